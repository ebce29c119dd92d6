"""Five-point conservative stencils for periodic convection-diffusion.

The operator ``-u*phi' + kappa*phi''`` is discretised on a uniform periodic
grid by a two-parameter family of five-point schemes.  Everything here is
exact linear algebra on circulant matrices: scheme coefficients, their
eigenvalues in closed form, and the continuous spectral curve the eigenvalues
trace as the grid is refined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "FIRST_DIFF",
    "SECOND_DIFF",
    "THIRD_DIFF",
    "FOURTH_DIFF",
    "PeRegime",
    "SchemeKind",
    "PhysicalParams",
    "StencilScheme",
    "SpectralCurve",
    "build_scheme",
    "named_scheme",
    "apply_scheme",
    "apply_coefficients",
    "eigenvalue",
    "curve_point",
    "spectral_curve",
    "discrete_curve",
]

# Basis stencils on offsets (-2, -1, 0, 1, 2).  The first two are the
# fourth-order first and second differences; the last two are the narrowest
# centered third and fourth differences, used as tuning directions.
FIRST_DIFF = np.array([1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])
SECOND_DIFF = np.array([-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0])
THIRD_DIFF = np.array([-0.5, 1.0, 0.0, -1.0, 0.5])
FOURTH_DIFF = np.array([1.0, -4.0, 6.0, -4.0, 1.0])

OFFSETS = (-2, -1, 0, 1, 2)


class PeRegime(Enum):
    """Cell Peclet regime: pure diffusion, mixed, or pure convection."""

    ZERO = "zero"
    FINITE = "finite"
    INFINITE = "infinite"


class SchemeKind(Enum):
    CENTERED = "centered"
    WEAK_UPWIND = "weak"
    STRONG_UPWIND = "strong"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PhysicalParams:
    """Velocity, diffusion coefficient and grid spacing for one node.

    Conventions: ``peclet() == 0`` when u = 0 and ``peclet() == inf`` when
    kappa = 0.  Both coefficients vanishing is rejected.
    """

    u: float
    kappa: float
    dx: float

    def __post_init__(self):
        if self.u < 0 or self.kappa < 0:
            raise ValueError("u and kappa must be nonnegative")
        if self.u == 0 and self.kappa == 0:
            raise ValueError("u and kappa cannot both vanish")
        if self.dx <= 0:
            raise ValueError("dx must be positive")

    def peclet(self) -> float:
        if self.u == 0:
            return 0.0
        if self.kappa == 0:
            return math.inf
        return self.u * self.dx / self.kappa

    def regime(self) -> PeRegime:
        if self.u == 0:
            return PeRegime.ZERO
        if self.kappa == 0:
            return PeRegime.INFINITE
        return PeRegime.FINITE


@dataclass(frozen=True, eq=False)
class StencilScheme:
    """A five-point conservative scheme with its tuning weights.

    ``coeffs`` are the fully scaled coefficients (a_-2 .. a_2), including the
    factor u/dx in the convective regimes and kappa/dx^2 for pure diffusion.
    ``theta3``/``theta4`` weight the third and fourth difference; for u = 0
    they are the rescaled limits of the convective weights (see build_scheme).
    """

    coeffs: np.ndarray
    theta3: float
    theta4: float
    params: PhysicalParams
    kind: SchemeKind = SchemeKind.CUSTOM

    @property
    def regime(self) -> PeRegime:
        return self.params.regime()

    @property
    def scale(self) -> float:
        """u/dx in the convective regimes, kappa/dx^2 for pure diffusion."""
        p = self.params
        if self.regime is PeRegime.ZERO:
            return p.kappa / p.dx**2
        return p.u / p.dx


def build_scheme(theta3: float, theta4: float, params: PhysicalParams,
                 kind: SchemeKind = SchemeKind.CUSTOM) -> StencilScheme:
    """Assemble the scaled five-point coefficients for the given weights.

    Convective regimes:
        -(u/dx) * (FIRST - SECOND/Pe + theta3*THIRD + theta4*FOURTH)
    with the 1/Pe term dropped when kappa = 0.  For u = 0 the family is
    reparameterised around the diffusion operator,
        (kappa/dx^2) * (SECOND + theta3*THIRD + theta4*FOURTH),
    whose weights arise as limits of Pe times the convective ones.
    """
    regime = params.regime()
    if regime is PeRegime.FINITE:
        w = FIRST_DIFF - SECOND_DIFF / params.peclet() \
            + theta3 * THIRD_DIFF + theta4 * FOURTH_DIFF
        coeffs = -(params.u / params.dx) * w
    elif regime is PeRegime.INFINITE:
        w = FIRST_DIFF + theta3 * THIRD_DIFF + theta4 * FOURTH_DIFF
        coeffs = -(params.u / params.dx) * w
    else:
        w = SECOND_DIFF + theta3 * THIRD_DIFF + theta4 * FOURTH_DIFF
        coeffs = (params.kappa / params.dx**2) * w
    coeffs = np.asarray(coeffs, dtype=float)
    coeffs.setflags(write=False)
    return StencilScheme(coeffs=coeffs, theta3=float(theta3),
                         theta4=float(theta4), params=params, kind=kind)


def named_scheme(kind: SchemeKind, params: PhysicalParams) -> StencilScheme:
    """Centered, weak-upwind or strong-upwind instance for the given regime.

    The weak upwind cancels a_2 (third order); the strong upwind cancels both
    a_1 and a_2 (second order, heavily dispersive).  The weights below are the
    unique choices doing so at each Peclet number, with dedicated limit values
    for Pe = 0 and Pe = inf.
    """
    regime = params.regime()
    if kind is SchemeKind.CENTERED:
        th3, th4 = 0.0, 0.0
    elif kind is SchemeKind.WEAK_UPWIND:
        if regime is PeRegime.FINITE:
            pe = params.peclet()
            th3, th4 = 0.0, (pe - 1.0) / (12.0 * pe)
        else:
            # limit of (Pe-1)/(12 Pe) as Pe -> inf, and of its Pe-rescaled
            # counterpart as Pe -> 0, happen to coincide
            th3, th4 = 0.0, 1.0 / 12.0
    elif kind is SchemeKind.STRONG_UPWIND:
        if regime is PeRegime.FINITE:
            pe = params.peclet()
            th3 = (3.0 - pe) / (3.0 * pe)
            th4 = (3.0 * pe - 7.0) / (12.0 * pe)
        elif regime is PeRegime.INFINITE:
            th3, th4 = -1.0 / 3.0, 1.0 / 4.0
        else:
            th3, th4 = -1.0, 7.0 / 12.0
    else:
        raise ValueError("named_scheme expects a named kind, not CUSTOM")
    return build_scheme(th3, th4, params, kind=kind)


def apply_coefficients(coeffs: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Periodic five-point application; coeffs is (5,) or (5, I) node-wise."""
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[-1]
    if n < 5:
        raise ValueError("need at least 5 nodes for a five-point stencil")
    out = np.zeros_like(phi)
    for row, k in enumerate(OFFSETS):
        out += coeffs[row] * np.roll(phi, -k)
    return out


def apply_scheme(scheme: StencilScheme, phi: np.ndarray) -> np.ndarray:
    """Apply the scheme to a periodic vector of nodal values."""
    return apply_coefficients(scheme.coeffs[:, None], phi)


def _basis_eigenvalues(omega):
    """Closed-form circulant eigenvalues of the four basis stencils.

    omega = 2*pi*s is the angle of the Fourier mode; the fourth-difference
    eigenvalue lies in [0, 16].
    """
    c = np.cos(omega)
    s = np.sin(omega)
    lam1 = 1j * s * (1.0 - (c - 1.0) / 3.0)
    lam2 = (c - 1.0) * (2.0 - (c - 1.0) / 3.0)
    lam3 = 2j * s * (c - 1.0)
    lam4 = 4.0 * (c - 1.0) ** 2
    return lam1, lam2, lam3, lam4


def curve_point(scheme: StencilScheme, s):
    """Unscaled spectral point rho(s); the operator eigenvalue is scale*rho(s).

    rho carries the sign convention that stable modes sit in the closed left
    half-plane, so the convective combinations are negated relative to the
    basis eigenvalues.
    """
    omega = 2.0 * np.pi * np.asarray(s, dtype=float)
    lam1, lam2, lam3, lam4 = _basis_eigenvalues(omega)
    t3, t4 = scheme.theta3, scheme.theta4
    regime = scheme.regime
    if regime is PeRegime.FINITE:
        pe = scheme.params.peclet()
        return -(lam1 - lam2 / pe + t3 * lam3 + t4 * lam4)
    if regime is PeRegime.INFINITE:
        return -(lam1 + t3 * lam3 + t4 * lam4)
    return lam2 + t3 * lam3 + t4 * lam4


def _grid_size(dx: float) -> int:
    n = round(1.0 / dx)
    if n < 1 or abs(n * dx - 1.0) > 1e-9:
        raise ValueError("dx must equal 1/I for a positive integer I")
    return n


def eigenvalue(scheme: StencilScheme, i: int) -> complex:
    """Eigenvalue of the assembled circulant for Fourier index i in 1..I."""
    n = _grid_size(scheme.params.dx)
    if not 1 <= i <= n:
        raise ValueError(f"index must lie in 1..{n}")
    return complex(scheme.scale * curve_point(scheme, i / n))


@dataclass(frozen=True, eq=False)
class SpectralCurve:
    """Sampled spectral curve rho(s) with its physical scale factor.

    The eigenvalue view is ``scale * rho``; keeping the scale apart lets the
    CFL engine rescale without resampling.
    """

    regime: PeRegime
    s: np.ndarray
    rho: np.ndarray
    scale: float

    @property
    def samples(self):
        return list(zip(self.s.tolist(), self.rho.tolist()))

    @property
    def lam(self) -> np.ndarray:
        return self.scale * self.rho


def _extreme_real_samples(scheme: StencilScheme) -> list[float]:
    """Parameter values that can carry the most negative real part.

    Re rho is a quadratic in cos(omega), so the candidates are the edge
    cos = -1 (s = 1/2, always included by the caller) plus at most one
    interior stationary point, solved exactly here.
    """
    regime = scheme.regime
    if regime is PeRegime.FINITE:
        q = 1.0 / 3.0 + 4.0 * scheme.params.peclet() * scheme.theta4
    elif regime is PeRegime.ZERO:
        q = 1.0 / 3.0 - 4.0 * scheme.theta4
    else:
        return []  # Re rho = -4*theta4*(cos-1)^2 peaks at the edge
    if q == 0.0:
        return []
    c_star = 1.0 + 1.0 / q
    if -1.0 < c_star < 1.0:
        s_star = math.acos(c_star) / (2.0 * math.pi)
        return [s_star, 1.0 - s_star]
    return []


def spectral_curve(scheme: StencilScheme, n_samples: int = 1024) -> SpectralCurve:
    """Uniform sampling of rho on [0, 1) plus the extreme-real-part samples."""
    if n_samples < 64:
        raise ValueError("n_samples must be at least 64")
    s = np.arange(n_samples) / n_samples
    extra = [0.5] + _extreme_real_samples(scheme)
    s = np.unique(np.concatenate([s, np.asarray(extra)]))
    rho = np.asarray(curve_point(scheme, s), dtype=complex)
    return SpectralCurve(regime=scheme.regime, s=s, rho=rho, scale=scheme.scale)


def discrete_curve(scheme: StencilScheme) -> SpectralCurve:
    """The I actual grid eigenvalues (s = i/I) instead of the continuous curve."""
    n = _grid_size(scheme.params.dx)
    s = np.arange(1, n + 1) / n
    rho = np.asarray(curve_point(scheme, s), dtype=complex)
    return SpectralCurve(regime=scheme.regime, s=s, rho=rho, scale=scheme.scale)
