"""Command-line front end.

Subcommands mirror the library layers: spectrum / region / tableau / cfl /
cfl-curve expose the analysis tools, solve runs a configured problem, bench
reproduces the canned studies.  Delimited output goes to --out / --out-dir;
the reporting paths (solve, bench) also render a PNG next to each CSV, and
the analysis commands do so with --plot.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from .cfl import cfl_curve, optimal_cfl, params_for_pe, polynomial_by_name
from .rkdesign import quartic_pair_polynomial, region_boundary, synthesize_tableau
from .solver import SolveConfig, advance, error_inf
from .spectral import SchemeKind, discrete_curve, named_scheme, spectral_curve

_SCHEMES = {
    "centered": SchemeKind.CENTERED,
    "weak": SchemeKind.WEAK_UPWIND,
    "strong": SchemeKind.STRONG_UPWIND,
}


def _parse_pe(text: str) -> float:
    if text.lower() in ("inf", "infinity", "+inf"):
        return float("inf")
    pe = float(text)
    if pe < 0:
        raise argparse.ArgumentTypeError("pe must be nonnegative")
    return pe


def _poly_from_name(name: str):
    if name.startswith("custom:"):
        w3, w4 = (float(v) for v in name.split(":", 1)[1].split(","))
        return quartic_pair_polynomial(w3, w4)
    return polynomial_by_name(name)


def _write_csv(path: str, header: str, rows: np.ndarray) -> None:
    np.savetxt(path, rows, delimiter=",", header=header, comments="",
               fmt="%.12g")
    print(f"wrote {path}")


# ------------------------------------------------------------- subcommands

def _cmd_spectrum(args) -> int:
    params = params_for_pe(args.pe, dx=args.dx)
    scheme = named_scheme(_SCHEMES[args.scheme], params)
    curve = spectral_curve(scheme, n_samples=args.samples)
    lam = curve.lam
    rows = np.column_stack([curve.s, curve.rho.real, curve.rho.imag,
                            lam.real, lam.imag])
    _write_csv(args.out, "s,re_rho,im_rho,re_lambda,im_lambda", rows)
    if args.plot:
        from . import plots
        print(f"wrote {plots.render_spectrum(args.out)}")
    return 0


def _cmd_region(args) -> int:
    poly = _poly_from_name(args.poly)
    region = region_boundary(poly, n_rays=args.rays)
    z = region.boundary()
    rows = np.column_stack([region.thetas, z.real, z.imag])
    _write_csv(args.out, "theta,re_z,im_z", rows)
    if args.plot:
        from . import plots
        print(f"wrote {plots.render_region(args.out)}")
    return 0


def _cmd_tableau(args) -> int:
    tab = synthesize_tableau(args.w3, args.w4, a43=args.a43, b2_hint=args.b2)
    payload = {
        "a": tab.a.tolist(),
        "b": tab.b.tolist(),
        "c": tab.c.tolist(),
        "w3": tab.w3,
        "w4": tab.w4,
        "residuals": tab.order_residuals(),
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_cfl(args) -> int:
    dx = 1.0 / args.I
    params = params_for_pe(args.pe, dx=dx)
    scheme = named_scheme(_SCHEMES[args.space], params)
    curve = discrete_curve(scheme) if args.discrete else spectral_curve(scheme)
    res = optimal_cfl(curve, polynomial_by_name(args.time))
    mode = "discrete" if args.discrete else "continuous"
    print(f"scheme={args.space} integrator={args.time} pe={args.pe} "
          f"I={args.I} ({mode} modes)")
    print(f"c_cfl = {res.c_cfl:.6g}")
    print(f"dt_max = {res.dt_max:.6g}  (u={params.u}, kappa={params.kappa}, "
          f"dx={dx:.6g})")
    return 0


def _cmd_cfl_curve(args) -> int:
    if args.pe_min > 0 and args.pe_max > 0:
        grid = np.geomspace(args.pe_min, args.pe_max, args.points)
    else:
        grid = np.linspace(args.pe_min, args.pe_max, args.points)
    rows = cfl_curve(_SCHEMES[args.space], args.time, grid)
    _write_csv(args.out, "pe,c_cfl", rows)
    if args.plot:
        from . import plots
        print(f"wrote {plots.render_cfl_curve(args.out)}")
    return 0


_SAFE_EVAL_NS = {
    "np": np, "pi": np.pi, "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs,
    "arctan": np.arctan, "arccos": np.arccos, "arcsin": np.arcsin,
}


def _expr_xt(expr):
    if expr is None:
        return None
    if isinstance(expr, (int, float)):
        return float(expr)
    code = compile(str(expr), "<config>", "eval")

    def fn(x, t=0.0):
        return eval(code, {"__builtins__": {}},
                    dict(_SAFE_EVAL_NS, x=np.asarray(x, dtype=float), t=t))

    return fn


def _problem_from_config(cfg: dict):
    prob = cfg.get("problem", {})
    n = int(cfg.get("I", prob.get("I", 100)))
    t_final = float(cfg.get("t_final", prob.get("t_final", 1.0)))
    if "benchmark" in prob:
        problem, exact = bench_mod.benchmark_problem(
            int(prob["benchmark"]), I=n if "I" in cfg else None,
            t_final=t_final if "t_final" in cfg else None)
        return problem, exact
    from .solver import Problem
    src = _expr_xt(prob.get("source"))
    problem = Problem(
        velocity=_expr_xt(prob.get("u", 1.0)),
        diffusion=_expr_xt(prob.get("kappa", 0.0)),
        source=src,
        initial=_expr_xt(prob["initial"]),
        t_final=t_final, I=n)
    return problem, _expr_xt(prob.get("exact"))


def _cmd_solve(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    problem, exact = _problem_from_config(cfg)
    mood_cfg = cfg.get("mood", {})
    mood_on = mood_cfg.get("enabled") if isinstance(mood_cfg, dict) else mood_cfg
    run_cfg = SolveConfig(
        space=cfg.get("space", "centered"),
        time=cfg.get("time", "rk4"),
        dt_policy=str(cfg.get("dt_policy", "max")),
        mood=None if mood_on is None else bool(mood_on),
        theta_scd=float(mood_cfg.get("theta_scd", 1.0)) if isinstance(mood_cfg, dict) else 1.0,
        theta_sd=float(mood_cfg.get("theta_sd", 0.5)) if isinstance(mood_cfg, dict) else 0.5,
        trace_detectors=args.trace_detectors,
    )
    state, reports = advance(problem, run_cfg)
    out = cfg.get("output", {})
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    sol_path = os.path.join(out_dir, out.get("solution", "solution.csv"))
    exact_nodes = None
    if exact is not None:
        exact_nodes = np.broadcast_to(
            np.asarray(exact(state.x, state.t), dtype=float),
            state.x.shape).copy()
        print(f"error_inf = {error_inf(state.phi, exact, state.t):.6g}")
    bench_mod.write_solution_csv(sol_path, state, exact_nodes)
    print(f"wrote {sol_path}")
    steps_path = os.path.join(out_dir, out.get("steps", "steps.csv"))
    bench_mod.write_step_report_csv(steps_path, reports)
    print(f"wrote {steps_path}")
    print(f"n_steps = {state.n_steps}, final dt = {state.dt:.6g}")
    if args.trace_detectors:
        cured = sorted({i for r in reports for i in r.cured_nodes})
        print(f"cured nodes over the run: {cured if cured else 'none'}")
    from . import plots
    for png in plots.render_artifacts([sol_path, steps_path]):
        print(f"wrote {png}")
    return 0


def _cmd_bench(args) -> int:
    ids = bench_mod.benchmark_ids() if args.id == "all" else [int(args.id)]
    os.makedirs(args.out_dir, exist_ok=True)
    reports = []
    for bench_id in ids:
        sub = os.path.join(args.out_dir, f"bench{bench_id}")
        report = bench_mod.run_benchmark(bench_id, out_dir=sub)
        reports.append(report)
        status = "PASS" if report["passed"] else "FAIL"
        print(f"benchmark {bench_id}: {status} ({report['description']})")
        for row in report["checks"]:
            mark = "ok " if row["passed"] else "BAD"
            print(f"  [{mark}] {row['metric']}: actual={row['actual']} "
                  f"target({row['op']})={row['expected']} tol={row['tol']}")
        from . import plots
        pngs = plots.render_artifacts(
            [os.path.join(sub, a) for a in report["artifacts"]])
        for png in pngs:
            print(f"  wrote {png}")
    summary = os.path.join(args.out_dir, "summary.json")
    with open(summary, "w", encoding="utf-8") as fh:
        json.dump(reports, fh, indent=2)
    print(f"wrote {summary}")
    if args.strict and not all(r["passed"] for r in reports):
        return 1
    return 0


# ------------------------------------------------------------------ parser

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="convdiff",
        description="Five-point stencil spectra, tuned integrators, and a "
                    "periodic convection-diffusion solver.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="sample a scheme's spectral curve")
    s.add_argument("--scheme", choices=sorted(_SCHEMES), required=True)
    s.add_argument("--pe", type=_parse_pe, required=True,
                   help="cell Peclet number (a float, 0, or 'inf')")
    s.add_argument("--samples", type=int, default=1024)
    s.add_argument("--dx", type=float, default=0.04)
    s.add_argument("--out", default="spectrum.csv")
    s.add_argument("--plot", action="store_true")
    s.set_defaults(fn=_cmd_spectrum)

    s = sub.add_parser("region", help="trace a stability-region boundary")
    s.add_argument("--poly", default="rk4",
                   help="rk1..rk4, rkd, bakker, p4, or custom:w3,w4")
    s.add_argument("--rays", type=int, default=512)
    s.add_argument("--out", default="region.csv")
    s.add_argument("--plot", action="store_true")
    s.set_defaults(fn=_cmd_region)

    s = sub.add_parser("tableau", help="synthesize a 4-stage tableau")
    s.add_argument("--w3", type=float, required=True)
    s.add_argument("--w4", type=float, required=True)
    s.add_argument("--a43", type=float, default=1.0)
    s.add_argument("--b2", type=float, default=0.4)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=_cmd_tableau)

    s = sub.add_parser("cfl", help="stable step for one configuration")
    s.add_argument("--space", choices=sorted(_SCHEMES), required=True)
    s.add_argument("--time", default="rk4")
    s.add_argument("--pe", type=_parse_pe, required=True)
    s.add_argument("--I", type=int, default=25)
    s.add_argument("--discrete", action="store_true",
                   help="use the I grid modes instead of the continuous curve")
    s.set_defaults(fn=_cmd_cfl)

    s = sub.add_parser("cfl-curve", help="stable Courant number vs Peclet")
    s.add_argument("--space", choices=sorted(_SCHEMES), required=True)
    s.add_argument("--time", default="rk4")
    s.add_argument("--pe-min", type=float, default=0.1)
    s.add_argument("--pe-max", type=float, default=1000.0)
    s.add_argument("--points", type=int, default=25)
    s.add_argument("--out", default="cfl_curve.csv")
    s.add_argument("--plot", action="store_true")
    s.set_defaults(fn=_cmd_cfl_curve)

    s = sub.add_parser("solve", help="run a configured problem")
    s.add_argument("--config", required=True, help="JSON configuration file")
    s.add_argument("--out-dir", default=".")
    s.add_argument("--trace-detectors", action="store_true")
    s.set_defaults(fn=_cmd_solve)

    s = sub.add_parser("bench", help="run the canned benchmark studies")
    s.add_argument("--id", default="all",
                   help="benchmark id 1..7 or 'all'")
    s.add_argument("--out-dir", default="bench_out")
    s.add_argument("--strict", action="store_true",
                   help="exit nonzero if any tagged target misses")
    s.set_defaults(fn=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
