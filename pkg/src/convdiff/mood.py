"""A-posteriori detection chain and the cure that remaps flagged nodes.

A candidate update is screened node by node.  Nodes that pass keep the
accurate scheme; nodes that fail are switched to the robust pair (weak-upwind
stencil with the damped integrator) and the step is recomputed, until the
flag set reaches a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds for the small-curvature and non-smoothness screens."""

    theta_scd: float = 1.0
    theta_sd: float = 0.5


@dataclass(eq=False)
class DetectorOutcome:
    """Per-node boolean results of a full chain evaluation."""

    ed: np.ndarray
    scd: np.ndarray
    lod: np.ndarray
    sd: np.ndarray
    cured: np.ndarray


def _neighbors(phi: np.ndarray):
    return np.roll(phi, 1), np.roll(phi, -1)  # left, right (periodic)


def _extremum_mask(phi: np.ndarray) -> np.ndarray:
    """Strict local extremum: both one-sided differences share a sign.

    A flat tie (either difference equal to zero) is not an extremum; spurious
    oscillations produce strict alternation.
    """
    left, right = _neighbors(phi)
    return np.sign((phi - right) * (phi - left)) > 0


def _curvature(phi: np.ndarray, dx: float) -> np.ndarray:
    left, right = _neighbors(phi)
    return (right - 2.0 * phi + left) / dx


def _small_slope_mask(phi: np.ndarray, dx: float, theta_scd: float) -> np.ndarray:
    """Both one-sided slopes below theta_scd * dx: plateau-scale extremum."""
    left, right = _neighbors(phi)
    v = np.maximum(np.abs(phi - left), np.abs(phi - right)) / dx
    return v < theta_scd * dx


def _oscillation_mask(chi: np.ndarray) -> np.ndarray:
    """Curvature sign not constant across the three-node neighborhood."""
    sl, sr = np.sign(np.roll(chi, 1)), np.sign(np.roll(chi, -1))
    sc = np.sign(chi)
    return ~((sl == sc) & (sc == sr))


def _nonsmooth_mask(chi: np.ndarray, theta_sd: float) -> np.ndarray:
    """Curvature magnitude collapsing within the neighborhood: a kink."""
    a = np.abs(chi)
    al, ar = np.abs(np.roll(chi, 1)), np.abs(np.roll(chi, -1))
    lo = np.minimum(np.minimum(al, a), ar)
    hi = np.maximum(np.maximum(al, a), ar)
    return lo < theta_sd * hi


def detect_extremum(phi, i: int) -> bool:
    return bool(_extremum_mask(np.asarray(phi, dtype=float))[i])


def detect_small_curvature(phi, dx: float, i: int,
                           config: DetectorConfig = DetectorConfig()) -> bool:
    return bool(_small_slope_mask(np.asarray(phi, dtype=float), dx,
                                  config.theta_scd)[i])


def detect_local_oscillation(phi, dx: float, i: int) -> bool:
    chi = _curvature(np.asarray(phi, dtype=float), dx)
    return bool(_oscillation_mask(chi)[i])


def detect_nonsmooth(phi, dx: float, i: int,
                     config: DetectorConfig = DetectorConfig()) -> bool:
    chi = _curvature(np.asarray(phi, dtype=float), dx)
    return bool(_nonsmooth_mask(chi, config.theta_sd)[i])


def run_chain(candidate: np.ndarray, css: np.ndarray, dx: float,
              config: DetectorConfig = DetectorConfig()) -> DetectorOutcome:
    """Evaluate the chain on a candidate update.

    Only nodes still on the accurate scheme (css == 0) can be flagged.  A node
    is cured when it is a genuine extremum (ED), not plateau-small (SCD), and
    either the oscillation or the non-smoothness screen fires.
    """
    phi = np.asarray(candidate, dtype=float)
    ed = _extremum_mask(phi)
    scd = _small_slope_mask(phi, dx, config.theta_scd)
    chi = _curvature(phi, dx)
    lod = _oscillation_mask(chi)
    sd = _nonsmooth_mask(chi, config.theta_sd)
    eligible = np.asarray(css) == 0
    cured = eligible & ed & ~scd & (lod | sd)
    return DetectorOutcome(ed=ed, scd=scd, lod=lod, sd=sd, cured=cured)


def cure_and_remap(state, outcome: DetectorOutcome) -> int:
    """Apply a chain outcome to the solver state: flag nodes, refresh steps.

    Returns the number of newly cured nodes.  A cured node moves to the
    weak-upwind stencil, and its integrator is re-derived from the per-node
    Peclet rule (damped below the weak-scheme threshold, classical above);
    the per-node step map must be refreshed because the new pair has its own
    stable-step limit.  Uncured nodes keep their assignment.
    """
    from .solver import hybrid_cts, refresh_node_steps  # circular at module scope

    new = outcome.cured & (state.css == 0)
    n_new = int(np.count_nonzero(new))
    if n_new:
        state.css[new] = 1
        for i in np.flatnonzero(new):
            state.cts[i] = hybrid_cts(float(state.pe[i]), 1)
        refresh_node_steps(state)
    return n_new
