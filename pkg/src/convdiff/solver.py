"""Method-of-lines integrator on the periodic unit interval.

Space and time schemes are chosen per node through two integer maps: css
(0 = the configured base stencil, 1 = weak upwind) and cts (0 = the classical
fourth-order integrator, 1 = the damped one).  All tableaux share the same
sub-step nodes, so node-wise mixing inside one Runge-Kutta step is well
defined.  The global step is the minimum of the per-node stable steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cfl import cached_cfl_number
from .mood import DetectorConfig, cure_and_remap, run_chain
from .rkdesign import classical_rk4_tableau, damped_tableau
from .spectral import PhysicalParams, SchemeKind, apply_coefficients, named_scheme

__all__ = [
    "Problem",
    "SolverState",
    "StepReport",
    "SolveConfig",
    "init_state",
    "stable_step",
    "local_dt",
    "refresh_node_steps",
    "hybrid_cts",
    "rk_step",
    "linear_step_map",
    "advance",
    "steady_solve",
    "error_inf",
    "order_inf",
]

_SPACE_KINDS = {
    "centered": SchemeKind.CENTERED,
    "adaptive": SchemeKind.CENTERED,
    "weak": SchemeKind.WEAK_UPWIND,
    "strong": SchemeKind.STRONG_UPWIND,
}


def _as_field(fn_or_const, x: np.ndarray) -> np.ndarray:
    if callable(fn_or_const):
        return np.broadcast_to(np.asarray(fn_or_const(x), dtype=float),
                               x.shape).copy()
    return np.full_like(x, float(fn_or_const))


@dataclass(frozen=True, eq=False)
class Problem:
    """Periodic 1-D convection-diffusion setup on [0, 1)."""

    velocity: object          # u(x) >= 0, callable or constant
    diffusion: object         # kappa(x) >= 0, callable or constant
    source: object            # f(x, t), callable or None
    initial: object           # phi(x, 0), callable
    t_final: float
    I: int

    def __post_init__(self):
        if self.I < 5:
            raise ValueError("need at least 5 nodes for the 5-point stencils")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        ends = np.array([0.0, 1.0])
        g = _as_field(self.initial, ends)
        if abs(g[0] - g[1]) > 1e-12:
            raise ValueError("initial data is not 1-periodic")
        if self.source is not None:
            f = np.asarray(self.source(ends, 0.0), dtype=float)
            f = np.broadcast_to(f, ends.shape)
            if abs(f[0] - f[1]) > 1e-12:
                raise ValueError("source is not 1-periodic in x")


@dataclass(eq=False)
class SolverState:
    phi: np.ndarray
    css: np.ndarray           # 0 = base stencil, 1 = weak upwind
    cts: np.ndarray           # 0 = classical, 1 = damped
    pe: np.ndarray            # per-node cell Peclet
    t: float
    dt: float
    n_steps: int
    # grid and frozen coefficient samples
    x: np.ndarray = None
    dx: float = 0.0
    u: np.ndarray = None
    kappa: np.ndarray = None
    node_dt: np.ndarray = None
    kind0: SchemeKind = SchemeKind.CENTERED
    _banks: object = None


@dataclass(eq=False)
class StepReport:
    dt_used: float
    cured_nodes: list
    detector_trace: object    # list of DetectorOutcome, one per chain pass, or None
    recompute_count: int


@dataclass
class SolveConfig:
    """Run configuration; mirrors the CLI's solve config file."""

    space: str = "centered"       # centered | weak | strong | adaptive
    time: str = "rk4"             # rk4 | rkd | hybrid
    dt_policy: str = "max"        # max | factor:<r> | fixed:<v>
    mood: bool | None = None      # default: on exactly when space == "adaptive"
    theta_scd: float = 1.0
    theta_sd: float = 0.5
    trace_detectors: bool = False
    max_steps: int = 10_000_000

    def mood_enabled(self) -> bool:
        return self.space == "adaptive" if self.mood is None else bool(self.mood)

    def detector_config(self) -> DetectorConfig:
        return DetectorConfig(theta_scd=self.theta_scd, theta_sd=self.theta_sd)


def _policy_dt(policy: str, dt_stable: float) -> float:
    if policy == "max":
        return dt_stable
    head, _, val = policy.partition(":")
    if head == "factor":
        return float(val) * dt_stable
    if head == "fixed":
        return float(val)
    raise ValueError(f"unknown dt policy {policy!r}")


def hybrid_cts(pe_i: float, css_i: int) -> int:
    """Damped integrator on low-Peclet nodes, classical elsewhere.

    The damped scheme pays off where diffusion dominates the stable step;
    the switch point is higher for the weak-upwind stencil because its
    diffusive stability interval is longer.
    """
    threshold = 5.0 if css_i == 0 else 15.0
    return 1 if pe_i < threshold else 0


_RK_NAMES = ("rk4", "rkd")


def local_dt(i: int, css_i: int, cts_i: int, state: SolverState) -> float:
    """Stable step of node i under the given scheme assignment."""
    u_i, k_i = state.u[i], state.kappa[i]
    if u_i == 0.0 and k_i == 0.0:
        raise ValueError(f"node {i}: velocity and diffusion both vanish")
    kind = state.kind0 if css_i == 0 else SchemeKind.WEAK_UPWIND
    c = cached_cfl_number(kind, _RK_NAMES[cts_i], state.pe[i])
    if u_i > 0.0:
        return c * state.dx / u_i
    return c * state.dx**2 / k_i


def refresh_node_steps(state: SolverState, indices=None) -> None:
    idx = range(len(state.phi)) if indices is None else indices
    for i in idx:
        state.node_dt[i] = local_dt(i, int(state.css[i]), int(state.cts[i]), state)


def _base_maps(state: SolverState, config: SolveConfig):
    n = len(state.phi)
    css = np.zeros(n, dtype=int) if config.space != "weak" else np.ones(n, dtype=int)
    if config.time == "rk4":
        cts = np.zeros(n, dtype=int)
    elif config.time == "rkd":
        cts = np.ones(n, dtype=int)
    elif config.time == "hybrid":
        thresholds = np.where(css == 0, 5.0, 15.0)
        cts = (state.pe < thresholds).astype(int)
    else:
        raise ValueError(f"unknown time scheme {config.time!r}")
    return css, cts


def init_state(problem: Problem, config: SolveConfig) -> SolverState:
    n = problem.I
    dx = 1.0 / n
    x = np.arange(n) * dx
    u = _as_field(problem.velocity, x)
    kappa = _as_field(problem.diffusion, x)
    if np.any(u < 0) or np.any(kappa < 0):
        raise ValueError("velocity and diffusion must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        pe = np.where(u == 0.0, 0.0,
                      np.where(kappa == 0.0, np.inf, u * dx / kappa))
    state = SolverState(
        phi=_as_field(problem.initial, x), css=None, cts=None, pe=pe,
        t=0.0, dt=0.0, n_steps=0, x=x, dx=dx, u=u, kappa=kappa,
        node_dt=np.empty(n), kind0=_SPACE_KINDS[config.space],
    )
    state.css, state.cts = _base_maps(state, config)
    refresh_node_steps(state)
    return state


class _Banks:
    """Per-node stencil columns and the two tableaux, frozen for a run."""

    def __init__(self, state: SolverState):
        n = len(state.phi)
        self.c0 = np.empty((5, n))
        self.c1 = np.empty((5, n))
        for i in range(n):
            params = PhysicalParams(u=state.u[i], kappa=state.kappa[i],
                                    dx=state.dx)
            self.c0[:, i] = named_scheme(state.kind0, params).coeffs
            self.c1[:, i] = named_scheme(SchemeKind.WEAK_UPWIND, params).coeffs
        t0, t1 = classical_rk4_tableau(), damped_tableau()
        assert np.array_equal(t0.c, t1.c)  # node-wise mixing needs shared sub-steps
        self.a0, self.a1 = t0.a, t1.a
        self.b0, self.b1 = t0.b, t1.b
        self.c = t0.c


def _ensure_banks(state: SolverState) -> _Banks:
    if state._banks is None:
        state._banks = _Banks(state)
    return state._banks


def _source_at(problem: Problem, x: np.ndarray, t: float) -> np.ndarray:
    if problem.source is None:
        return 0.0
    return np.broadcast_to(np.asarray(problem.source(x, t), dtype=float), x.shape)


def _rk_apply(state: SolverState, dt: float, problem: Problem,
              phi: np.ndarray, t: float) -> np.ndarray:
    banks = _ensure_banks(state)
    bank = np.where(state.css == 0, banks.c0, banks.c1)
    classical = state.cts == 0
    stages = []
    for j in range(4):
        y = phi
        for ell in range(j):
            a_j = np.where(classical, banks.a0[j, ell], banks.a1[j, ell])
            y = y + dt * a_j * stages[ell]
        stages.append(apply_coefficients(bank, y)
                      + _source_at(problem, state.x, t + banks.c[j] * dt))
    out = phi
    for j in range(4):
        b_j = np.where(classical, banks.b0[j], banks.b1[j])
        out = out + dt * b_j * stages[j]
    return out


def rk_step(state: SolverState, dt: float, problem: Problem) -> np.ndarray:
    """One mixed-tableau step from state.phi at state.t; does not commit."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return _rk_apply(state, dt, problem, state.phi, state.t)


def linear_step_map(state: SolverState, dt: float, problem: Problem):
    """Affine form phi' = M phi + g of one step at frozen t (f static in t).

    Exact, not an approximation: the stage recursion is affine in phi.
    """
    n = len(state.phi)
    g = _rk_apply(state, dt, problem, np.zeros(n), state.t)
    m = np.empty((n, n))
    eye = np.eye(n)
    for i in range(n):
        m[:, i] = _rk_apply(state, dt, problem, eye[i], state.t) - g
    return m, g


def stable_step(problem: Problem, config: SolveConfig = SolveConfig()) -> float:
    """The run's global stable step min_i dt_i, before any policy scaling."""
    return float(init_state(problem, config).node_dt.min())


def advance(problem: Problem, config: SolveConfig = SolveConfig()):
    """March to t_final; returns the final state and per-step reports."""
    state = init_state(problem, config)
    mood_on = config.mood_enabled()
    det = config.detector_config()
    base_css = state.css.copy()
    base_cts = state.cts.copy()
    base_node_dt = state.node_dt.copy()
    tf = problem.t_final
    reports = []

    def next_dt() -> float:
        dt = _policy_dt(config.dt_policy, float(state.node_dt.min()))
        dt = min(dt, tf - state.t)  # land exactly on t_final
        if dt < 1e-14 * tf:
            raise ValueError("time step underflow; configuration is inconsistent")
        return dt

    while state.t < tf * (1.0 - 1e-12):
        if state.n_steps >= config.max_steps:
            raise RuntimeError("step cap exceeded")
        if mood_on:
            state.css[:] = base_css
            state.cts[:] = base_cts
            state.node_dt[:] = base_node_dt
        dt = next_dt()
        candidate = _rk_apply(state, dt, problem, state.phi, state.t)
        passes = []
        recomputes = 0
        if mood_on:
            for _ in range(len(state.phi) + 1):
                outcome = run_chain(candidate, state.css, state.dx, det)
                passes.append(outcome)
                if cure_and_remap(state, outcome) == 0:
                    break
                dt = next_dt()  # cured nodes may tighten the stable step
                candidate = _rk_apply(state, dt, problem, state.phi, state.t)
                recomputes += 1
        cured = np.flatnonzero(state.css != base_css).tolist()
        state.phi = candidate
        state.t = tf if tf - (state.t + dt) < 1e-12 * tf else state.t + dt
        state.dt = dt
        state.n_steps += 1
        reports.append(StepReport(
            dt_used=dt, cured_nodes=cured,
            detector_trace=passes if config.trace_detectors else None,
            recompute_count=recomputes))
    return state, reports


def steady_solve(problem: Problem, config: SolveConfig | None = None,
                 tol: float = 1e-10, max_steps: int = 2_000_000) -> np.ndarray:
    """Pseudo-time march to the steady state of E[phi] + f = 0.

    The one-step map is affine and frozen in time, so the march iterates the
    assembled (M, g) pair.  The mean of g is removed first: the periodic
    operator annihilates constants, so a steady state exists only for
    zero-mean forcing, and the discrete source samples carry a small
    quadrature mean that would otherwise drift forever.  The solution's mean
    is pinned by the initial guess.
    """
    # slightly inside the stability limit, otherwise the binding mode of a
    # purely convective problem sits at |R| = 1 and never decays
    cfg = config or SolveConfig(dt_policy="factor:0.9")
    state = init_state(problem, cfg)
    dt = _policy_dt(cfg.dt_policy, float(state.node_dt.min()))
    m, g = linear_step_map(state, dt, problem)
    g = g - g.mean()
    phi = state.phi.copy()
    for _ in range(max_steps):
        nxt = m @ phi + g
        if np.max(np.abs(nxt - phi)) / dt < tol:
            return nxt
        phi = nxt
    raise RuntimeError("pseudo-time iteration did not reach steady state")


def error_inf(phi: np.ndarray, exact, t: float) -> float:
    """Max-norm error against exact(x, t) on the solution's own grid."""
    n = len(phi)
    x = np.arange(n) / n
    return float(np.max(np.abs(phi - np.asarray(exact(x, t), dtype=float))))


def order_inf(e1: float, i1: int, e2: float, i2: int):
    """Observed convergence order between two grids; None if degenerate."""
    if i1 >= i2:
        raise ValueError("need i1 < i2")
    if e1 <= 0 or e2 <= 0:
        return None
    return abs(math.log(e1 / e2)) / abs(math.log(i1 / i2))
