"""Acceptance gate: every numbered criterion at its stated tolerance.

Each criterion prints one PASS/FAIL line in the terminal summary (see
conftest).  Where an honest measurement contradicts a published target, the
main criterion test asserts the measured value (so silent drift still fails)
and records the criterion as FAIL, while a strict-xfail companion asserts the
target as stated; if the code ever starts meeting the target, the xfail turns
into an error and the pin must be revisited.  Nothing is loosened to pass.
"""

import math
import time

import numpy as np
import pytest

from conftest import record_criterion

from convdiff import (
    SchemeKind,
    SolveConfig,
    advance,
    apply_scheme,
    bakker_polynomial,
    build_scheme,
    classical_rk4_tableau,
    damped_polynomial,
    damped_tableau,
    diffusive_cfl,
    eigenvalue,
    imaginary_axis_radius,
    named_scheme,
    optimize_positive_polynomial,
    p4_polynomial,
    real_axis_radius,
    rk_polynomial,
    run_benchmark,
    scheme_cfl,
)
from convdiff.bench import benchmark_problem
from convdiff.cfl import cached_cfl_number, params_for_pe
from convdiff.rkdesign import positive_band_radius
from convdiff.solver import Problem, init_state, linear_step_map
from convdiff.spectral import OFFSETS

KINDS = (SchemeKind.CENTERED, SchemeKind.WEAK_UPWIND, SchemeKind.STRONG_UPWIND)


# ----------------------------------------------------------- criterion 1

def test_criterion_1_spectral_oracle():
    """Analytic eigenvalues vs the dense circulant's LAPACK spectrum, 1e-10."""
    t0 = time.perf_counter()
    worst = 0.0
    for n in (8, 16, 32):
        for kind in KINDS:
            for pe in (0.0, 0.5, 1.0, 5.0, np.inf):
                scheme = named_scheme(kind, params_for_pe(pe, dx=1.0 / n))
                dense = np.zeros((n, n))
                for coeff, off in zip(scheme.coeffs, OFFSETS):
                    for j in range(n):
                        dense[j, (j + off) % n] += coeff
                spectrum = np.linalg.eigvals(dense)
                for i in range(1, n + 1):
                    lam = eigenvalue(scheme, i)
                    worst = max(worst, np.min(np.abs(spectrum - lam)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    record_criterion(1, "spectral oracle (3 schemes x 5 Peclet x 3 grids)", ok,
                     f"max deviation {worst:.2e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 1.0


# ----------------------------------------------------------- criterion 2

def test_criterion_2_axis_radii():
    p4_reach = imaginary_axis_radius(p4_polynomial())
    rk4_reach = imaginary_axis_radius(rk_polynomial(4))
    bakker_reach = real_axis_radius(bakker_polynomial())
    damped_reach = real_axis_radius(damped_polynomial())

    ok_p4 = abs(p4_reach - 3.0) <= 1e-3
    ok_rk4 = abs(rk4_reach - 2.0 * math.sqrt(2.0)) <= 1e-3
    ok_bakker = abs(bakker_reach - 10.0) <= 0.01
    ok_damped = abs(damped_reach - 9.43) <= 0.05
    record_criterion(
        2, "integrator axis radii", ok_p4 and ok_rk4 and ok_bakker and ok_damped,
        f"damped real reach measures {damped_reach:.4f} against target 9.43+-0.05 "
        "(pinned xfail); the other three radii hold")
    assert ok_p4 and ok_rk4 and ok_bakker
    # drift watch on the pinned value: the honest measurement itself is stable
    assert damped_reach == pytest.approx(9.667756, abs=1e-4)
    # the banded reach (which the free pair was actually tuned for) is 9.43
    assert positive_band_radius(damped_polynomial(), 0.01, 0.7) == pytest.approx(
        9.4261, abs=1e-3)


@pytest.mark.xfail(strict=True, reason="damped real-axis reach measures 9.6678; "
                   "the 9.43 target matches its banded reach, not the |R|<=1 reach")
def test_criterion_2_damped_real_radius_as_stated():
    assert abs(real_axis_radius(damped_polynomial()) - 9.43) <= 0.05


# ----------------------------------------------------------- criterion 3

def test_criterion_3_positivity_optimizer():
    t0 = time.perf_counter()
    poly = optimize_positive_polynomial(0.01, 0.7)
    elapsed = time.perf_counter() - t0
    w3, w4 = poly.free_coeffs
    reach = positive_band_radius(poly, 0.01, 0.7)
    ok = (abs(w3 - 603.0 / 6998.0) <= 5e-3 and abs(w4 - 15.0 / 3212.0) <= 5e-3
          and reach >= 9.3 and elapsed < 60.0)
    record_criterion(3, "positive-band optimizer recovers the damped pair", ok,
                     f"w=({w3:.6f}, {w4:.6f}), reach {reach:.3f}, {elapsed:.1f}s")
    assert abs(w3 - 603.0 / 6998.0) <= 5e-3
    assert abs(w4 - 15.0 / 3212.0) <= 5e-3
    assert reach >= 9.3
    assert elapsed < 60.0


# ----------------------------------------------------------- criterion 4

def test_criterion_4_tableaux():
    classical = classical_rk4_tableau()
    a = np.zeros((4, 4))
    a[1, 0], a[2, 1], a[3, 2] = 0.5, 0.5, 1.0
    exact = (np.allclose(classical.a, a, atol=1e-14)
             and np.allclose(classical.b, [1 / 6, 1 / 3, 1 / 3, 1 / 6], atol=1e-14)
             and np.allclose(classical.c, [0.0, 0.5, 0.5, 1.0]))

    damped = damped_tableau()
    printed_a = np.zeros((4, 4))
    printed_a[1, 0] = 0.5
    printed_a[2, 0], printed_a[2, 1] = 334.0 / 861.0, 373.0 / 3328.0
    printed_a[3, 0], printed_a[3, 1], printed_a[3, 2] = \
        481.0 / 3310.0, 587.0 / 1655.0, 0.5
    printed_b = np.array([1.0 / 6.0, 0.4, 4.0 / 15.0, 1.0 / 6.0])
    within = (np.max(np.abs(damped.a - printed_a)) <= 1e-3
              and np.max(np.abs(damped.b - printed_b)) <= 1e-3)

    residuals_ok = all(
        abs(v) <= 1e-12
        for tab in (classical, damped)
        for v in tab.order_residuals().values())

    ok = exact and within and residuals_ok
    record_criterion(4, "tableau synthesis (classical exact, damped to 1e-3)", ok,
                     f"max damped deviation {np.max(np.abs(damped.a - printed_a)):.1e}")
    assert exact
    assert within
    assert residuals_ok


# ----------------------------------------------------------- criterion 5

def test_criterion_5_cfl_spot_values():
    cases = [
        (SchemeKind.CENTERED, "rk4", 10.0, 2.0935),
        (SchemeKind.WEAK_UPWIND, "rk4", 5.0, 1.3117),
        (SchemeKind.CENTERED, "rkd", 10.0, 1.3479),
        (SchemeKind.WEAK_UPWIND, "rkd", 5.0, 1.7948),
    ]
    worst = 0.0
    for kind, rk, pe, target in cases:
        scheme = named_scheme(kind, params_for_pe(pe, dx=1.0 / 25.0))
        got = scheme_cfl(scheme, rk, discrete_modes=True).c_cfl
        worst = max(worst, abs(got - target))
    ok = worst <= 0.01
    record_criterion(5, "stable-step spot values (discrete modes, I=25)", ok,
                     f"max deviation {worst:.4f}")
    assert worst <= 0.01


# ----------------------------------------------------------- criterion 6

# (pe, scheme kind, integrator) -> published stable-step number.  The five
# pinned cells measure outside the stated bands; their honest values are
# asserted below and the published values in the strict-xfail companion.
_TABLE_CELLS = {
    (0.0, "centered", "rkd"): 1.77, (0.0, "weak", "rkd"): 2.36,
    (0.0, "centered", "rk4"): 0.53, (0.0, "weak", "rk4"): 0.70,
    (20.0, "centered", "rkd"): 1.04, (20.0, "weak", "rkd"): 1.60,
    (20.0, "centered", "rk4"): 1.62, (20.0, "weak", "rk4"): 1.66,
    (200.0, "centered", "rkd"): 0.45, (200.0, "weak", "rkd"): 1.34,
    (200.0, "centered", "rk4"): 2.04, (200.0, "weak", "rk4"): 1.74,
    (2e4, "centered", "rkd"): 0.09, (2e4, "weak", "rkd"): 1.25,
    (2e4, "centered", "rk4"): 2.06, (2e4, "weak", "rk4"): 1.75,
    (2e5, "centered", "rkd"): 0.04, (2e5, "weak", "rkd"): 1.24,
    (2e5, "centered", "rk4"): 2.06, (2e5, "weak", "rk4"): 1.75,
    (np.inf, "centered", "rkd"): 0.00, (np.inf, "weak", "rkd"): 1.24,
    (np.inf, "centered", "rk4"): 2.55, (np.inf, "weak", "rk4"): 1.75,
}
_PINNED_CELLS = {
    (0.0, "centered", "rkd"): 1.8127,
    (0.0, "weak", "rkd"): 2.4169,
    (20.0, "centered", "rk4"): 2.1403,
    (200.0, "centered", "rk4"): 2.0768,
    (np.inf, "centered", "rk4"): 2.0612,
}
_KIND = {"centered": SchemeKind.CENTERED, "weak": SchemeKind.WEAK_UPWIND}


def _table_cell(pe, kind_name, rk):
    if pe == 0.0:
        return diffusive_cfl(_KIND[kind_name], rk)
    return cached_cfl_number(_KIND[kind_name], rk, pe)


def _cell_in_band(measured, printed, pe):
    if pe == 0.0:  # step-size coefficients in dx^2/kappa units: relative band
        return abs(measured - printed) <= 0.02 * abs(printed)
    return abs(measured - printed) <= 0.02


def test_criterion_6_stable_step_table():
    misses = []
    for (pe, kind_name, rk), printed in _TABLE_CELLS.items():
        measured = _table_cell(pe, kind_name, rk)
        key = (pe, kind_name, rk)
        if key in _PINNED_CELLS:
            # drift watch: the honest measurement must stay put
            assert measured == pytest.approx(_PINNED_CELLS[key], abs=2e-3)
            assert not _cell_in_band(measured, printed, pe)
            misses.append(f"{kind_name}/{rk}@Pe={pe:g}")
        else:
            assert _cell_in_band(measured, printed, pe), \
                f"{kind_name}/{rk}@Pe={pe:g}: {measured:.4f} vs {printed}"
    record_criterion(6, "stable-step table, 24 cells", False,
                     f"19 of 24 in band; pinned: {', '.join(misses)}")


@pytest.mark.parametrize("pe,kind_name,rk", sorted(_PINNED_CELLS, key=str))
@pytest.mark.xfail(strict=True, reason="published cell not reproduced by either "
                   "the continuous or the grid-mode convention")
def test_criterion_6_pinned_cells_as_stated(pe, kind_name, rk):
    measured = _table_cell(pe, kind_name, rk)
    assert _cell_in_band(measured, _TABLE_CELLS[(pe, kind_name, rk)], pe)


# ------------------------------------------------- criteria 7 and 8 (bench 4)

_PRINTED_CONVERGENCE = {
    "centered": {100: (1.68e-2, None), 200: (3.88e-3, 2.1), 400: (4.88e-4, 3.0),
                 800: (3.83e-5, 3.7), 1600: (2.46e-6, 4.4)},
    "weak": {100: (2.20e-2, None), 200: (6.29e-3, 1.8), 400: (1.20e-3, 2.4),
             800: (1.70e-4, 2.8), 1600: (2.15e-5, 3.0)},
}
_PRINTED_SWEEP_N = {
    (25, "centered"): {1.0: 13, 0.8: 16, 1.1: 12},
    (25, "weak"): {1.0: 15, 0.8: 18, 1.1: 13},
    (50, "centered"): {1.0: 25, 0.8: 31, 1.1: 23},
    (50, "weak"): {1.0: 29, 0.8: 36, 1.1: 27},
    (100, "centered"): {1.0: 49, 0.8: 61, 1.1: 45},
    (100, "weak"): {1.0: 58, 0.8: 72, 1.1: 53},
    (200, "centered"): {1.0: 98, 0.8: 122, 1.1: 89},
    (200, "weak"): {1.0: 115, 0.8: 144, 1.1: 105},
}


@pytest.fixture(scope="module")
def report4():
    t0 = time.perf_counter()
    report = run_benchmark(4)
    report["elapsed"] = time.perf_counter() - t0
    return report


def test_criterion_7_convergence_table(report4):
    m = report4["metrics"]
    for label, rows in _PRINTED_CONVERGENCE.items():
        for n, (err, order) in rows.items():
            measured = m[f"E_{label}_I{n}"]
            assert abs(measured - err) <= 0.10 * err, \
                f"E_{label}_I{n}: {measured:.3e} vs {err:.3e}"
            if order is None:
                continue
            got = m[f"O_{label}_I{n}"]
            if label == "centered" and n == 1600:
                # pinned: measures 3.96, beyond the +-0.3 band around 4.4
                assert got == pytest.approx(3.9593, abs=2e-3)
                continue
            assert abs(got - order) <= 0.3, f"O_{label}_I{n}: {got:.3f} vs {order}"
    ok_time = report4["elapsed"] < 120.0
    record_criterion(
        7, "convergence table (errors 10%, orders +-0.3)", False,
        "all errors and 7 of 8 orders in band; pinned: accurate-pair order at "
        f"the finest grid measures 3.96 vs 4.4; {report4['elapsed']:.1f}s")
    assert ok_time


@pytest.mark.xfail(strict=True, reason="finest-grid order measures 3.96; the "
                   "published 4.4 exceeds the stencil's formal order and is "
                   "inconsistent with the published errors it accompanies")
def test_criterion_7_finest_order_as_stated(report4):
    got = report4["metrics"]["O_centered_I1600"]
    assert abs(got - 4.4) <= 0.3


def test_criterion_8_stability_sweep(report4):
    m = report4["metrics"]
    for (n, label), factors in _PRINTED_SWEEP_N.items():
        for factor, printed_n in factors.items():
            key = f"{label}_I{n}_f{factor}"
            assert abs(m[f"n_sweep_{key}"] - printed_n) <= 2, \
                f"n_sweep_{key}: {m[f'n_sweep_{key}']} vs {printed_n}"
            err = m[f"E_sweep_{key}"]  # None encodes a non-finite error
            if factor != 1.1:
                assert err is not None and math.isfinite(err), f"E_sweep_{key}"
            elif (n, label) == (25, "weak"):
                # pinned: the coarsest weak-upwind run only degrades (E = 0.40)
                assert err == pytest.approx(0.40136, abs=2e-3)
            else:
                assert err is None or err > 1.0, f"E_sweep_{key}: {err}"
    record_criterion(
        8, "stability sweep (finite at <=1.0 dt_max, blowup at 1.1)", False,
        "23 of 24 cells as stated; pinned: weak upwind at the coarsest grid "
        "stays at E=0.40 past the limit, matching its own printed row")


@pytest.mark.xfail(strict=True, reason="the coarsest weak-upwind over-limit run "
                   "measures E=0.40, finite and below 1; the blowup claim "
                   "contradicts the published row value 4.62e-1 itself")
def test_criterion_8_weak_coarse_blowup_as_stated(report4):
    err = report4["metrics"]["E_sweep_weak_I25_f1.1"]
    assert err is None or err > 1.0


# ----------------------------------------------------------- criterion 9

def test_criterion_9_hybrid_cost():
    report = run_benchmark(5)
    m = report["metrics"]
    bands = {"hybrid_centered": (286, 15, 5.56e-5), "hybrid_weak": (229, 12, 1.46e-4),
             "rk4_centered": (993, 50, 3.03e-6), "rk4_weak": (792, 40, 7.80e-5)}
    ok = True
    for label, (n_ref, n_tol, e_ref) in bands.items():
        ok &= abs(m[f"n_{label}"] - n_ref) <= n_tol
        ok &= e_ref / 2.0 <= m[f"E_{label}"] <= e_ref * 2.0
    ok &= m["speedup_centered"] >= 3.0 and m["speedup_weak"] >= 3.0
    record_criterion(9, "per-node integrator selection payoff", bool(ok),
                     f"speedups {m['speedup_centered']:.2f}/{m['speedup_weak']:.2f}, "
                     f"steps {m['n_hybrid_centered']}/{m['n_hybrid_weak']}"
                     f"/{m['n_rk4_centered']}/{m['n_rk4_weak']}")
    for label, (n_ref, n_tol, e_ref) in bands.items():
        assert abs(m[f"n_{label}"] - n_ref) <= n_tol
        assert e_ref / 2.0 <= m[f"E_{label}"] <= e_ref * 2.0
    assert m["speedup_centered"] >= 3.0
    assert m["speedup_weak"] >= 3.0


# ---------------------------------------------------- criteria 10 and 11

def test_criterion_10_detector_sanity():
    report = run_benchmark(6)
    cured = report["metrics"]["cured_total"]
    record_criterion(10, "no cures on the mild profile (Pe=6, I=60)", cured == 0,
                     f"cured_total={cured} over {report['info']['n_steps']} steps")
    assert cured == 0


def test_criterion_11_detector_cure():
    report = run_benchmark(7)
    m = report["metrics"]
    frac_ok = m["max_cured_fraction"] <= 0.08
    gap_ok = m["overshoot_mood"] < m["overshoot_plain"]
    record_criterion(
        11, "curing bounds the rough-profile overshoot (Pe=3, I=60)",
        frac_ok and gap_ok,
        f"max cured fraction {m['max_cured_fraction']:.3f}, overshoot "
        f"{m['overshoot_mood']:+.4f} vs unlimited {m['overshoot_plain']:+.4f}")
    assert frac_ok
    assert gap_ok


# ----------------------------------------------------------- criterion 12

def _random_config(rng):
    n = int(rng.integers(8, 49))
    space = rng.choice(["centered", "weak", "strong", "adaptive"])
    time_scheme = rng.choice(["rk4", "rkd", "hybrid"])
    draw = rng.random()
    if draw < 0.15:
        u, kappa = 0.0, float(10.0 ** rng.uniform(-3, 0))
    elif draw < 0.30:
        u, kappa = float(rng.uniform(0.3, 2.0)), 0.0
    else:
        u, kappa = float(rng.uniform(0.3, 2.0)), float(10.0 ** rng.uniform(-4, -1))
    return n, space, time_scheme, u, kappa


def test_criterion_12_property_suites():
    rng = np.random.default_rng(20240819)

    # one-step map contraction at the stable step, 100 random configurations.
    # Some draws honestly admit no positive step (the damped integrator on a
    # purely imaginary curve; strong upwind below cell Peclet ~1, where its
    # blend turns the diffusion operator unstable): there is no step map to
    # test, so those are redrawn.
    worst_radius = 0.0
    tested = 0
    for _ in range(400):
        if tested == 100:
            break
        n, space, time_scheme, u, kappa = _random_config(rng)
        problem = Problem(velocity=u, diffusion=kappa, source=None,
                          initial=lambda x: np.sin(2.0 * np.pi * x),
                          t_final=1.0, I=n)
        state = init_state(problem, SolveConfig(space=space, time=time_scheme))
        dt = float(state.node_dt.min())
        if dt == 0.0:
            continue
        m, _ = linear_step_map(state, dt, problem)
        worst_radius = max(worst_radius, float(np.max(np.abs(np.linalg.eigvals(m)))))
        tested += 1
    assert tested == 100
    assert worst_radius <= 1.0 + 1e-8

    # constants are annihilated by every assembled stencil
    for _ in range(100):
        pe = float(rng.choice([0.0, rng.uniform(0.1, 50.0), np.inf]))
        t3, t4 = rng.normal(size=2)
        scheme = build_scheme(t3, t4, params_for_pe(pe, dx=0.03125))
        out = apply_scheme(scheme, np.full(32, float(rng.normal())))
        assert np.max(np.abs(out)) <= 1e-9 * max(1.0, scheme.scale)

    # detector soundness and css monotonicity on every recorded step of a
    # curing run (tight threshold so the chain actually fires)
    problem, _ = benchmark_problem(7)
    cfg = SolveConfig(space="adaptive", time="hybrid", dt_policy="max",
                      theta_scd=3500.0, trace_detectors=True)
    _, reports = advance(problem, cfg)
    n = problem.I
    saw_cure = False
    for rep in reports:
        eligible = np.ones(n, dtype=bool)  # css resets to the base map each step
        for out in rep.detector_trace:
            expected = eligible & out.ed & ~out.scd & (out.lod | out.sd)
            assert np.array_equal(out.cured, expected)
            assert not np.any(out.cured & ~eligible)  # never re-cure a node
            eligible &= ~out.cured
            saw_cure |= bool(out.cured.any())
        assert rep.cured_nodes == sorted(np.flatnonzero(~eligible).tolist())
    assert saw_cure  # the run must actually exercise the chain

    # a smooth run must sail through the chain untouched
    smooth = Problem(velocity=1.0, diffusion=1.0 / 160.0, source=None,
                     initial=lambda x: np.sin(2.0 * np.pi * x),
                     t_final=0.3, I=40)
    _, quiet = advance(smooth, SolveConfig(space="adaptive", time="hybrid"))
    assert all(r.cured_nodes == [] for r in quiet)

    record_criterion(
        12, "property suites (contraction, constants, detector soundness)", True,
        f"worst one-step spectral radius {worst_radius:.12f}")
