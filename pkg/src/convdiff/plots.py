"""Figure rendering for the CLI: one PNG next to each delimited output.

Lives outside the numerical core on purpose; nothing here is imported by the
solver or benchmark modules.  Uses the Agg backend so headless runs work.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "render_solution",
    "render_steps",
    "render_convergence",
    "render_sweep",
    "render_spectrum",
    "render_region",
    "render_cfl_curve",
    "render_artifacts",
]


def _png_path(csv_path: str) -> str:
    return os.path.splitext(csv_path)[0] + ".png"


def _save(fig, csv_path: str, png_path: str | None) -> str:
    path = png_path or _png_path(csv_path)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_solution(csv_path: str, png_path: str | None = None) -> str:
    d = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if np.isfinite(d["exact"]).any():
        ax.plot(d["x"], d["exact"], "k-", lw=1.0, label="exact")
    ax.plot(d["x"], d["phi"], "o-", ms=3, lw=0.8, label="numeric")
    cured = d["css"] == 1
    if cured.any() and not cured.all():
        ax.plot(d["x"][cured], d["phi"][cured], "rs", ms=5, mfc="none",
                label="cured nodes")
    ax.set_xlabel("x")
    ax.set_ylabel("phi")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(os.path.basename(csv_path))
    return _save(fig, csv_path, png_path)


def render_steps(csv_path: str, png_path: str | None = None) -> str:
    d = np.genfromtxt(csv_path, delimiter=",", names=True,
                      usecols=(0, 1, 2, 3))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 4.4), sharex=True)
    ax1.plot(np.atleast_1d(d["t"]), np.atleast_1d(d["dt"]), "-")
    ax1.set_ylabel("dt")
    ax2.step(np.atleast_1d(d["t"]), np.atleast_1d(d["n_cured"]), where="mid")
    ax2.set_ylabel("cured nodes")
    ax2.set_xlabel("t")
    ax1.set_title(os.path.basename(csv_path))
    return _save(fig, csv_path, png_path)


def render_convergence(csv_path: str, png_path: str | None = None) -> str:
    rows = np.genfromtxt(csv_path, delimiter=",", names=True,
                         dtype=None, encoding="utf-8")
    rows = np.atleast_1d(rows)
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    for scheme in np.unique(rows["scheme"]):
        sel = rows[rows["scheme"] == scheme]
        ax.loglog(sel["I"], sel["error_inf"], "o-", label=str(scheme))
    i_ref = np.array([rows["I"].min(), rows["I"].max()], dtype=float)
    e0 = rows["error_inf"].max()
    ax.loglog(i_ref, e0 * (i_ref / i_ref[0]) ** -4.0, "k--", lw=0.8,
              label="slope -4")
    ax.set_xlabel("I")
    ax.set_ylabel("max-norm error")
    ax.legend(fontsize=8)
    ax.set_title("grid convergence")
    return _save(fig, csv_path, png_path)


def render_sweep(csv_path: str, png_path: str | None = None) -> str:
    rows = np.atleast_1d(np.genfromtxt(csv_path, delimiter=",", names=True,
                                       dtype=None, encoding="utf-8"))
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    for scheme in np.unique(rows["scheme"]):
        for factor in np.unique(rows["dt_factor"]):
            sel = rows[(rows["scheme"] == scheme)
                       & (rows["dt_factor"] == factor)]
            err = np.where(np.isfinite(sel["error_inf"]),
                           sel["error_inf"], 1e12)
            ax.loglog(sel["I"], err, "o-",
                      label=f"{scheme}, {factor} x dt_max")
    ax.axhline(1.0, color="k", lw=0.6, ls=":")
    ax.set_xlabel("I")
    ax.set_ylabel("max-norm error (capped)")
    ax.legend(fontsize=7)
    ax.set_title("stability sweep")
    return _save(fig, csv_path, png_path)


def render_spectrum(csv_path: str, png_path: str | None = None) -> str:
    d = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5.0, 4.6))
    ax.plot(d["re_rho"], d["im_rho"], "-", lw=1.0)
    ax.axhline(0, color="k", lw=0.5)
    ax.axvline(0, color="k", lw=0.5)
    ax.set_xlabel("Re rho")
    ax.set_ylabel("Im rho")
    ax.set_title("spectral curve")
    ax.set_aspect("equal", adjustable="datalim")
    return _save(fig, csv_path, png_path)


def render_region(csv_path: str, png_path: str | None = None) -> str:
    d = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5.0, 4.6))
    ax.fill(d["re_z"], d["im_z"], alpha=0.25)
    ax.plot(d["re_z"], d["im_z"], "-", lw=1.0)
    ax.axhline(0, color="k", lw=0.5)
    ax.axvline(0, color="k", lw=0.5)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title("stability region")
    ax.set_aspect("equal", adjustable="datalim")
    return _save(fig, csv_path, png_path)


def render_cfl_curve(csv_path: str, png_path: str | None = None) -> str:
    d = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    pe = np.atleast_1d(d["pe"])
    c = np.atleast_1d(d["c_cfl"])
    if np.all(pe > 0):
        ax.semilogx(pe, c, "o-")
    else:
        ax.plot(pe, c, "o-")
    ax.set_xlabel("cell Peclet number")
    ax.set_ylabel("stable Courant number")
    ax.set_title("stable step vs Peclet")
    return _save(fig, csv_path, png_path)


def render_artifacts(paths) -> list:
    """Dispatch renderer by artifact name; returns the PNGs written."""
    out = []
    for p in paths:
        if not p.endswith(".csv"):
            continue
        name = os.path.basename(p)
        try:
            if "steps" in name:
                out.append(render_steps(p))
            elif "convergence" in name:
                out.append(render_convergence(p))
            elif "sweep" in name:
                out.append(render_sweep(p))
            else:
                out.append(render_solution(p))
        except Exception as exc:  # a bad figure must not kill the report
            print(f"warning: could not render {name}: {exc}")
    return out
