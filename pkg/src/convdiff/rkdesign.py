"""Four-stage stability polynomials, their regions, and tableau synthesis.

The transfer polynomial of an explicit s-stage method of order p is
``R(z) = 1 + z + ... + z^p/p! + w_{p+1} z^{p+1} + ... + w_s z^s``.  This
module measures the axis coverage of such polynomials, optimises the free
pair (w3, w4) under a positivity band on the negative real axis, and turns a
chosen pair into a Butcher tableau sharing the classical sub-step nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "StabilityPolynomial",
    "StabilityRegion",
    "ButcherTableau",
    "eval_transfer",
    "first_crossing",
    "region_boundary",
    "imaginary_axis_radius",
    "real_axis_radius",
    "positive_band_radius",
    "optimize_positive_polynomial",
    "verify_ripple",
    "synthesize_tableau",
    "rk_polynomial",
    "p4_polynomial",
    "bakker_polynomial",
    "damped_polynomial",
    "quartic_pair_polynomial",
    "classical_rk4_tableau",
    "damped_tableau",
    "LONG_REAL_PAIR",
    "SHARED_NODES",
]

# Sub-step nodes shared by every tableau built here; node-wise mixing of two
# tableaux is only well defined because c is identical.
SHARED_NODES = (0.0, 0.5, 0.5, 1.0)

# Hand-tuned free pair whose real-axis radius is close to 11.  Kept as a
# constant: no optimisation problem defines it.
LONG_REAL_PAIR = (0.0834, 0.0042)


@dataclass(frozen=True, eq=False)
class StabilityPolynomial:
    """R(z) with coefficients 1/k! up to order_p, then the free ones."""

    order_p: int
    stages_s: int
    free_coeffs: tuple = ()

    def __post_init__(self):
        if self.order_p < 1:
            raise ValueError("order must be at least 1")
        if self.stages_s != self.order_p + len(self.free_coeffs):
            raise ValueError("stages must equal order plus free coefficients")

    def coefficients(self) -> np.ndarray:
        """Ascending coefficients c_0 .. c_s."""
        fixed = [1.0 / math.factorial(k) for k in range(self.order_p + 1)]
        return np.array(fixed + list(self.free_coeffs), dtype=float)


def rk_polynomial(order: int) -> StabilityPolynomial:
    """Transfer polynomial of the classical method of the given order (1..4)."""
    if not 1 <= order <= 4:
        raise ValueError("classical polynomials available for orders 1..4")
    return StabilityPolynomial(order_p=order, stages_s=order)


def p4_polynomial() -> StabilityPolynomial:
    """First-order quartic with the largest imaginary-axis segment (reach 3)."""
    return StabilityPolynomial(1, 4, (5.0 / 9.0, 4.0 / 27.0, 4.0 / 81.0))


def bakker_polynomial() -> StabilityPolynomial:
    """Second-order quartic with real stability interval [-10, 0]."""
    return StabilityPolynomial(2, 4, (2.0 / 25.0, 1.0 / 250.0))


def damped_polynomial() -> StabilityPolynomial:
    """Second-order quartic tuned to stay within a positive band on the real axis."""
    return StabilityPolynomial(2, 4, (603.0 / 6998.0, 15.0 / 3212.0))


def quartic_pair_polynomial(w3: float, w4: float) -> StabilityPolynomial:
    return StabilityPolynomial(2, 4, (float(w3), float(w4)))


def eval_transfer(poly: StabilityPolynomial, z):
    """Evaluate R at z (scalar or array), Horner form."""
    z = np.asarray(z)
    scalar = z.ndim == 0
    coeffs = poly.coefficients()
    out = np.full(z.shape, coeffs[-1], dtype=np.result_type(z.dtype, float))
    for a in coeffs[-2::-1]:
        out = out * z + a
    return out[()] if scalar else out


def _real_critical_points(poly: StabilityPolynomial, t_max: float) -> np.ndarray:
    """Real roots of R' in (-t_max, 0); R is extremal only there."""
    c = poly.coefficients()
    dc = c[1:] * np.arange(1, len(c))
    roots = np.roots(dc[::-1])
    real = roots[np.abs(roots.imag) < 1e-12].real
    return real[(real > -t_max) & (real < 0.0)]


def first_crossing(poly: StabilityPolynomial, dirs, t_max: float = 16.0,
                   n_march: int = 4096):
    """March each unit direction from the origin to its first exit |R| > 1.

    Returns ``(radii, entered)``.  ``entered`` is False when |R| >= 1 all the
    way out to the crossing, meaning the open region is never visited along
    that ray and only the origin itself is admissible.
    """
    dirs = np.atleast_1d(np.asarray(dirs, dtype=complex))
    t = np.linspace(0.0, t_max, n_march + 1)[1:]
    v = np.abs(eval_transfer(poly, t[:, None] * dirs[None, :]))
    outside = v > 1.0
    has_exit = outside.any(axis=0)
    first = np.where(has_exit, outside.argmax(axis=0), n_march - 1)
    rows = np.arange(n_march)[:, None]
    # |R(t d)| = 1 + t Re(d) + O(t^2), so a negative-real-part direction
    # always enters; the sampled-depth test would miss entry dips shallower
    # than its resolution and only decides the Re(d) >= 0 rays
    entered = ((v < 1.0 - 1e-12) & (rows < first[None, :])).any(axis=0) \
        | (np.real(dirs) < 0.0)
    lo = np.where(first > 0, t[np.maximum(first - 1, 0)], 0.0)
    hi = t[first]
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        inside = np.abs(eval_transfer(poly, mid * dirs)) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    radii = np.where(has_exit, 0.5 * (lo + hi), t_max)
    return radii, entered


@dataclass(eq=False)
class StabilityRegion:
    """Boundary of the origin-connected component of {|R(z)| < 1}."""

    polynomial: StabilityPolynomial
    thetas: np.ndarray
    radii: np.ndarray

    def boundary(self) -> np.ndarray:
        return self.radii * np.exp(1j * self.thetas)

    def first_crossing(self, dirs, t_max: float | None = None):
        if t_max is None:
            t_max = max(16.0, 1.25 * float(self.radii.max()))
        return first_crossing(self.polynomial, dirs, t_max=t_max)


def region_boundary(poly: StabilityPolynomial, n_rays: int = 512) -> StabilityRegion:
    """Radial scan of the first |R| = 1 crossing along n_rays directions."""
    if n_rays < 180:
        raise ValueError("need at least 180 rays")
    thetas = np.linspace(0.0, 2.0 * np.pi, n_rays, endpoint=False)
    t_max = max(16.0, 2.0 * real_axis_radius(poly))
    radii, _ = first_crossing(poly, np.exp(1j * thetas), t_max=t_max)
    return StabilityRegion(polynomial=poly, thetas=thetas, radii=radii)


def imaginary_axis_radius(poly: StabilityPolynomial, tol: float = 1e-9,
                          n_scan: int = 4096) -> float:
    """Largest eta such that |R| <= 1 on the whole segment [-i*eta, i*eta]."""

    def ok(eta: float) -> bool:
        y = np.linspace(0.0, eta, n_scan)
        return bool(np.all(np.abs(eval_transfer(poly, 1j * y)) <= 1.0 + tol))

    hi = 1e-3
    if not ok(hi):
        return 0.0
    while ok(hi):
        hi *= 2.0
        if hi > 64.0:
            raise ValueError("imaginary segment appears unbounded")
    lo = hi / 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def real_axis_radius(poly: StabilityPolynomial, tol: float = 1e-9) -> float:
    """Largest zeta with |R(x)| <= 1 on [-zeta, 0], origin-connected."""
    t_max = 24.0
    while abs(eval_transfer(poly, -t_max)) <= 1.0 + tol:
        t_max *= 2.0
        if t_max > 1e6:
            raise ValueError("real-axis interval appears unbounded")
    x = -np.linspace(0.0, t_max, 8193)
    x = np.union1d(x, _real_critical_points(poly, t_max))
    x = np.sort(x)[::-1]  # from the origin leftwards
    v = np.abs(eval_transfer(poly, x))
    bad = v > 1.0 + tol
    k = int(bad.argmax())
    if k == 0:  # |R| exceeds 1 immediately next to the origin
        return 0.0
    lo, hi = x[k - 1], x[k]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if abs(eval_transfer(poly, mid)) <= 1.0:
            lo = mid
        else:
            hi = mid
    return abs(0.5 * (lo + hi))


def positive_band_radius(poly: StabilityPolynomial, lower: float, upper: float,
                         t_max: float = 24.0, n_scan: int = 4801) -> float:
    """Reach of the band constraint lower <= R <= upper on the negative axis.

    R(0) = 1 sits above any admissible upper bound, so the initial descent is
    exempt: the radius is |x| at the first point past band entry where R
    leaves [lower, upper].  Returns 0 if the band is never entered.
    """
    x = np.union1d(-np.linspace(0.0, t_max, n_scan),
                   _real_critical_points(poly, t_max))
    x = np.sort(x)[::-1]
    r = eval_transfer(poly, x).real
    inside = r <= upper
    if not inside.any():
        return 0.0
    k_in = int(inside.argmax())
    tail = slice(k_in, None)
    viol = (r[tail] > upper) | (r[tail] < lower)
    if not viol.any():
        # R -> +inf eventually for our quartics; extend the scan
        return positive_band_radius(poly, lower, upper, 2.0 * t_max, 2 * n_scan)
    k_out = k_in + int(viol.argmax())
    if k_out == 0:
        return 0.0
    lo, hi = x[k_out - 1], x[k_out]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        rm = float(eval_transfer(poly, mid))
        if lower <= rm <= upper:
            lo = mid
        else:
            hi = mid
    return abs(0.5 * (lo + hi))


def optimize_positive_polynomial(lower: float, upper: float,
                                 grid_n: int = 200, grid_hi: float = 0.2
                                 ) -> StabilityPolynomial:
    """Maximise the banded real-axis reach over the free pair (w3, w4).

    Coarse grid over [0, grid_hi]^2 followed by a simplex refinement; the
    procedure is deterministic for fixed grid parameters.
    """
    if not 0.0 <= lower < upper <= 1.0:
        raise ValueError("bounds must satisfy 0 <= lower < upper <= 1")

    def coarse(w):
        return positive_band_radius(quartic_pair_polynomial(*w), lower, upper,
                                    n_scan=1201)

    ws = np.linspace(0.0, grid_hi, grid_n)
    best, best_val = (0.0, 0.0), -1.0
    for w3 in ws:
        for w4 in ws:
            val = coarse((w3, w4))
            if val > best_val:
                best, best_val = (w3, w4), val

    def fine(w):
        return -positive_band_radius(quartic_pair_polynomial(*w), lower, upper)

    res = minimize(fine, np.asarray(best), method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-12,
                                maxiter=4000, maxfev=8000))
    return quartic_pair_polynomial(*res.x)


def verify_ripple(poly: StabilityPolynomial, zeta: float, tol: float = 1e-5) -> bool:
    """Check the equioscillation signature of a real-axis-optimal polynomial.

    True iff |R| touches 1 at exactly s - p + 1 points of [-zeta, 0), with
    alternating signs of R and the leftmost touch at -zeta.  Not applicable
    when p = s (no free coefficients): returns False.
    """
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    if poly.stages_s == poly.order_p:
        return False
    want = poly.stages_s - poly.order_p + 1
    x = np.linspace(-zeta, 0.0, 20001, endpoint=False)
    r = eval_transfer(poly, x).real
    touch = np.abs(np.abs(r) - 1.0) < tol
    if not touch.any():
        return False
    idx = np.flatnonzero(touch)
    # cluster contiguous runs of touch samples, keep the extremal point of each
    breaks = np.flatnonzero(np.diff(idx) > 1)
    runs = np.split(idx, breaks + 1)
    xs, signs = [], []
    for run in runs:
        j = run[np.argmax(np.abs(r[run]))]
        xs.append(x[j])
        signs.append(1.0 if r[j] > 0 else -1.0)
    if len(xs) != want:
        return False
    if abs(xs[0] + zeta) > 1e-3 * zeta:
        return False
    signs = np.asarray(signs)
    return bool(np.all(signs[1:] == -signs[:-1]))


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Explicit 4-stage tableau (a, b, c) with its transfer pair (w3, w4)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    w3: float
    w4: float

    def __post_init__(self):
        if self.a.shape != (4, 4) or self.b.shape != (4,) or self.c.shape != (4,):
            raise ValueError("expected a 4-stage tableau")
        if np.any(np.abs(np.triu(self.a)) > 0):
            raise ValueError("a must be strictly lower triangular")
        if self.c[0] != 0.0:
            raise ValueError("the first node must be zero")

    def order_residuals(self) -> dict:
        """The six order/consistency conditions, as residuals."""
        a, b, c = self.a, self.b, self.c
        return {
            "sum_b": float(b.sum() - 1.0),
            "b_dot_c": float(b @ c - 0.5),
            "b_dot_c2": float(b @ c**2 - 1.0 / 3.0),
            "b_dot_c3": float(b @ c**3 - 0.25),
            "b_a_c": float(b @ (a @ c) - self.w3),
            "b_a2_c": float(b @ (a @ (a @ c)) - self.w4),
            "row_sums": float(np.max(np.abs(a.sum(axis=1) - c))),
        }

    def transfer_polynomial(self) -> StabilityPolynomial:
        return quartic_pair_polynomial(self.w3, self.w4)


def synthesize_tableau(w3: float, w4: float, c=SHARED_NODES, a43: float = 1.0,
                       b2_hint: float | None = 0.4) -> ButcherTableau:
    """Construct a 4-stage tableau realising the transfer pair (w3, w4).

    The weights b solve the four moment conditions sum b_i c_i^k = 1/(k+1).
    When the middle nodes coincide (the shared-node layout) that system is
    singular and b2 stays free; the remaining weights then have the closed
    forms used below, valid only if the nodes satisfy the compatibility
    relation of the third-moment condition.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (4,) or c[0] != 0.0:
        raise ValueError("need four nodes starting at zero")
    c2, c3, c4 = c[1], c[2], c[3]

    if abs(c2 * (c3 - c2) * (c4 - c3) * c4) > 1e-12:
        m = np.vstack([c**k for k in range(4)])
        b = np.linalg.solve(m, np.array([1.0, 0.5, 1.0 / 3.0, 0.25]))
    elif abs(c3 - c2) <= 1e-12 and c2 != 0.0 and c4 != 0.0 and c4 != c2:
        compat = 0.25 - (c4 + c2) / 3.0 + c4 * c2 / 2.0
        if abs(compat) > 1e-12:
            raise ValueError("nodes incompatible with the coincident-middle branch")
        b2 = 0.4 if b2_hint is None else float(b2_hint)
        b4 = (2.0 - 3.0 * c2) / (6.0 * c4 * (c4 - c2))
        b3 = (3.0 * c4 - 2.0) / (6.0 * c2 * (c4 - c2)) - b2
        b1 = (c4 + c2 - 1.0) / (6.0 * c2 * c4)
        b = np.array([b1, b2, b3, b4])
    else:
        raise ValueError("degenerate nodes outside the supported branch")

    if abs(b[3] * a43 * c2) < 1e-14:
        raise ValueError("b4 * a43 * c2 must not vanish")
    a = np.zeros((4, 4))
    a[1, 0] = c2
    a32 = w4 / (b[3] * a43 * c2)
    a[2, 1] = a32
    a[2, 0] = c3 - a32
    a42 = (w3 - b[3] * a43 * c3 - b[2] * c2 * a32) / (b[3] * c2)
    a[3, 2] = a43
    a[3, 1] = a42
    a[3, 0] = c4 - a42 - a43
    for arr in (a, b, c):
        arr.setflags(write=False)
    return ButcherTableau(a=a, b=b, c=c, w3=float(w3), w4=float(w4))


def classical_rk4_tableau() -> ButcherTableau:
    return synthesize_tableau(1.0 / 6.0, 1.0 / 24.0, a43=1.0, b2_hint=1.0 / 3.0)


def damped_tableau() -> ButcherTableau:
    return synthesize_tableau(603.0 / 6998.0, 15.0 / 3212.0, a43=0.5, b2_hint=0.4)
