"""Five-point stencils, tuned explicit integrators, and a periodic
convection-diffusion solver with a-posteriori scheme switching."""

from .spectral import (
    OFFSETS,
    PeRegime,
    PhysicalParams,
    SchemeKind,
    SpectralCurve,
    StencilScheme,
    apply_scheme,
    build_scheme,
    discrete_curve,
    eigenvalue,
    named_scheme,
    spectral_curve,
)
from .rkdesign import (
    ButcherTableau,
    StabilityPolynomial,
    StabilityRegion,
    bakker_polynomial,
    classical_rk4_tableau,
    damped_polynomial,
    damped_tableau,
    eval_transfer,
    imaginary_axis_radius,
    optimize_positive_polynomial,
    p4_polynomial,
    quartic_pair_polynomial,
    real_axis_radius,
    region_boundary,
    rk_polynomial,
    synthesize_tableau,
    verify_ripple,
)
from .cfl import (
    CflResult,
    cfl_curve,
    diffusive_cfl,
    optimal_cfl,
    params_for_pe,
    polynomial_by_name,
    scheme_cfl,
)
from .mood import DetectorConfig, DetectorOutcome, run_chain
from .solver import (
    Problem,
    SolveConfig,
    SolverState,
    StepReport,
    advance,
    error_inf,
    hybrid_cts,
    local_dt,
    order_inf,
    rk_step,
    stable_step,
    steady_solve,
)
from .bench import (
    BenchmarkCase,
    Expectation,
    benchmark_ids,
    benchmark_problem,
    delta_profile,
    run_benchmark,
    traveling_profile,
)

__version__ = "0.1.0"

__all__ = [
    "OFFSETS", "PeRegime", "PhysicalParams", "SchemeKind", "SpectralCurve",
    "StencilScheme", "apply_scheme", "build_scheme", "discrete_curve",
    "eigenvalue", "named_scheme", "spectral_curve",
    "ButcherTableau", "StabilityPolynomial", "StabilityRegion",
    "bakker_polynomial", "classical_rk4_tableau", "damped_polynomial",
    "damped_tableau", "eval_transfer", "imaginary_axis_radius",
    "optimize_positive_polynomial", "p4_polynomial",
    "quartic_pair_polynomial", "real_axis_radius", "region_boundary",
    "rk_polynomial", "synthesize_tableau", "verify_ripple",
    "CflResult", "cfl_curve", "diffusive_cfl", "optimal_cfl",
    "params_for_pe", "polynomial_by_name", "scheme_cfl",
    "DetectorConfig", "DetectorOutcome", "run_chain",
    "Problem", "SolveConfig", "SolverState", "StepReport", "advance",
    "error_inf", "hybrid_cts", "local_dt", "order_inf", "rk_step",
    "stable_step", "steady_solve",
    "BenchmarkCase", "Expectation", "benchmark_ids", "benchmark_problem",
    "delta_profile", "run_benchmark", "traveling_profile",
    "__version__",
]
