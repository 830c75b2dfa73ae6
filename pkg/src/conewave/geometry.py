"""Hyperbolic coordinate changes that move a stationary singularity onto a ray.

A stationary solution with singular support at the origin composed with

    inside  (|c| < 1):  u0((x1 + c t) / sqrt(1 - c^2))
    outside (|c| > 1):  u0((+-x1 + c t) / sqrt(c^2 - 1))

is singular exactly on the ray {x1 + c t = 0} (resp. {+-x1 + c t = 0}).
The inside map is a proper boost and leaves the wave operator alone, so the
composed field solves the same equation.  The outside map swaps the timelike
and spacelike characters and flips the sign of the d'Alembertian, hence of
the nonlinearity.  (Direct check: with u_tt - u_xx = kappa u^p stationary,
v = u0(x cosh + t sinh) gives v_tt - v_xx = (sinh^2 - cosh^2) u0'' = -u0'',
unchanged; the outside composition gives +u0''.  The residual test in the
suite discriminates the two sign choices by two orders of magnitude.)

Boosted objects are stored symbolically (base exponent plus affine map) so
the singular ray stays exact; grids enter only at diagnostic time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularPointError, UnsupportedExponentError
from .pseudofn import (
    PseudofunctionKind,
    PseudofunctionSpec,
    power_cell_averages,
    spectrum_amplitude,
    xplusi0_eval,
)
from .spectral import SpectralFunction, SpectralGrid, Tail
from .wavesolver import CauchyData, SpaceTimeField

__all__ = [
    "Regime",
    "Sign",
    "ConeClass",
    "BoostSpec",
    "BoostedSolution",
    "rapidity",
    "ray_classify",
    "boost_eval",
    "transform_point",
    "boosted_cauchy_data",
    "boosted_field",
]

TWO_PI = 2.0 * math.pi


class Regime(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"


class Sign(enum.Enum):
    PLUS = 1
    MINUS = -1


class ConeClass(enum.Enum):
    INSIDE_CONE = "InsideCone"
    ON_CONE = "OnCone"
    OUTSIDE_CONE = "OutsideCone"


def ray_classify(c: float) -> ConeClass:
    """Classify the ray {x + c t = 0} against the light cone {|x| = |t|}."""
    a = abs(c)
    if a < 1.0:
        return ConeClass.INSIDE_CONE
    if a == 1.0:
        return ConeClass.ON_CONE
    return ConeClass.OUTSIDE_CONE


def rapidity(c: float, regime: Regime) -> float:
    """Hyperbolic angle of the boost with speed c in the given regime.

    Inside: theta = artanh(c).  Outside: theta = artanh(1/|c|) (the sign of
    the spatial direction is carried separately).  |c| = 1 has no rapidity.
    """
    if regime is Regime.INSIDE:
        if not abs(c) < 1.0:
            raise InvalidArgumentError(f"inside regime needs |c| < 1, got c = {c}")
        return math.atanh(c)
    if not abs(c) > 1.0:
        raise InvalidArgumentError(f"outside regime needs |c| > 1, got c = {c}")
    return math.atanh(1.0 / abs(c))


@dataclass(frozen=True)
class BoostSpec:
    """Speed, regime and spatial sign of one coordinate change."""

    c: float
    regime: Regime
    sign: Sign = Sign.PLUS

    def __post_init__(self):
        rapidity(self.c, self.regime)  # validates the (c, regime) pairing
        if self.regime is Regime.OUTSIDE and self.c < 0:
            raise InvalidArgumentError(
                "outside speeds are normalized positive; fold the direction into sign"
            )
        if self.regime is Regime.INSIDE and self.sign is Sign.MINUS:
            raise InvalidArgumentError("the sign choice only exists in the outside regime")

    @staticmethod
    def from_speed(c: float) -> "BoostSpec":
        """Normalize a raw speed: |c| < 1 inside; c < -1 becomes (|c|, MINUS)."""
        if abs(c) < 1.0:
            return BoostSpec(c, Regime.INSIDE)
        if abs(c) > 1.0:
            return BoostSpec(abs(c), Regime.OUTSIDE, Sign.PLUS if c > 0 else Sign.MINUS)
        raise InvalidArgumentError("|c| = 1 is on the light cone and unrepresentable")

    @property
    def theta(self) -> float:
        return rapidity(self.c, self.regime)

    @property
    def cosh(self) -> float:
        if self.regime is Regime.INSIDE:
            return 1.0 / math.sqrt(1.0 - self.c * self.c)
        return self.c / math.sqrt(self.c * self.c - 1.0)

    @property
    def sinh(self) -> float:
        if self.regime is Regime.INSIDE:
            return self.c / math.sqrt(1.0 - self.c * self.c)
        return self.sign.value / math.sqrt(self.c * self.c - 1.0)

    @property
    def denominator(self) -> float:
        """sqrt(|1 - c^2|), the normalization in the composed argument."""
        return math.sqrt(abs(1.0 - self.c * self.c))


def transform_point(boost: BoostSpec, x: float, t: float):
    """Image of (x, t) under the coordinate change (for invariance checks)."""
    ch, sh = boost.cosh, boost.sinh
    if boost.regime is Regime.INSIDE:
        return (x * ch + t * sh, x * sh + t * ch)
    return (x * sh + t * ch, x * ch + t * sh)


@dataclass(frozen=True)
class BoostedSolution:
    """A stationary pseudofunction solution composed with a coordinate change."""

    base: PseudofunctionSpec
    boost: BoostSpec

    @property
    def nonlinearity_sign_flip(self) -> bool:
        """True when the composed field solves the equation with -kappa.

        Only the outside map flips the nonlinearity; see the module
        docstring for the direct computation.
        """
        return self.boost.regime is Regime.OUTSIDE

    def singular_position(self, t: float) -> float:
        """x1 with the composed argument zero at time t: x1 = -sign * c * t."""
        if self.boost.regime is Regime.INSIDE:
            return -self.boost.c * t
        return -self.boost.sign.value * self.boost.c * t

    def argument(self, x1, t: float):
        """Unscaled affine argument (+-x1 + c t); divide by `denominator` to
        get the base coordinate."""
        s = 1.0 if self.boost.regime is Regime.INSIDE else float(self.boost.sign.value)
        return s * np.asarray(x1, dtype=float) + self.boost.c * t


def boost_eval(b: BoostedSolution, x, t: float, eps: float):
    """Evaluate the boosted field at points x (length-n vectors) and time t.

    The regularization offset eps is applied to the unscaled coordinate
    (+-x1 + c t) before the 1/denominator dilation, so on the singular ray
    the magnitude grows like (eps/denominator)**lam; equivalently the
    spectrum in x is damped by exp(-2 pi eps xi).
    """
    xa = np.atleast_2d(np.asarray(x, dtype=float))
    if xa.shape[1] != b.base.n:
        raise InvalidArgumentError(f"points must have dimension n = {b.base.n}")
    den = b.boost.denominator
    y = b.argument(xa[:, 0], t) / den
    if b.base.kind is PseudofunctionKind.XPLUSI0:
        if eps <= 0:
            if np.any(y == 0.0):
                raise SingularPointError("argument hits the singular point; eps > 0 required")
            out = np.where(y > 0, 1.0, np.cos(math.pi * b.base.lam) + 1j * math.sin(math.pi * b.base.lam)) * np.abs(y) ** b.base.lam
        else:
            out = xplusi0_eval(b.base.lam, y, eps / den)
        return out if np.asarray(x).ndim > 1 else complex(out[0])
    rho2 = y * y + np.sum(xa[:, 1:] ** 2, axis=1) + (eps / den) ** 2
    if np.any(rho2 == 0.0):
        raise SingularPointError("radial argument hits the origin; eps > 0 required")
    out = rho2 ** (b.base.lam / 2.0) + 0j
    return out if np.asarray(x).ndim > 1 else complex(out[0])


def _dilated_xplusi0_data(lam: float, scale: float, grid: SpectralGrid):
    """Spectrum of u0(scale * x) for u0 = (x+i0)**lam, scale > 0.

    Dilation x -> a x maps the spectrum to a**lam C(lam) xi**(-lam-1); the
    half-line support is preserved only for positive scale.
    """
    if scale <= 0:
        raise UnsupportedExponentError(
            "negative dilation reflects the spectrum off the half-line; "
            "outside boosts with sign MINUS have no half-line data representation"
        )
    amp = spectrum_amplitude(lam) * scale**lam
    a = -lam - 1.0
    return SpectralFunction(grid, amp * power_cell_averages(a, grid), Tail(amp, a))


def boosted_cauchy_data(b: BoostedSolution, grid: SpectralGrid) -> CauchyData:
    """Spectral initial data of the boosted field (1D power base only).

    Position: u0(scale_x * x) with scale_x = cosh (inside) or sinh (outside).
    Velocity: scale_t * u0'(scale_x * x) with the roles swapped, built from
    the derivative rule (2 pi i xi multiplier) and the dilation rule.
    """
    if b.base.kind is not PseudofunctionKind.XPLUSI0:
        raise UnsupportedExponentError("only the 1D power base has half-line grid data")
    lam = b.base.lam
    if b.boost.regime is Regime.INSIDE:
        scale_x, scale_t = b.boost.cosh, b.boost.sinh
    else:
        scale_x, scale_t = b.boost.sinh, b.boost.cosh
    u0 = _dilated_xplusi0_data(lam, scale_x, grid)
    if scale_t == 0.0:
        u1 = SpectralFunction(grid, np.zeros(grid.bins, dtype=np.complex128))
    else:
        # u0'(x) spectrum is 2 pi i xi * C(lam) xi^{-lam-1}; dilate by scale_x
        amp = scale_t * scale_x ** (lam - 1.0) * 2j * math.pi * spectrum_amplitude(lam)
        a = -lam
        u1 = SpectralFunction(grid, amp * power_cell_averages(a, grid), Tail(amp, a))
    return CauchyData(u0, u1)


def boosted_field(b: BoostedSolution, grid: SpectralGrid, times) -> SpaceTimeField:
    """Spectral slices of the boosted field: u0(a(x + d t)) has spectrum
    a**lam exp(2 pi i d t xi) C(lam) xi**(-lam-1), with d = c for both
    regimes (phase factor applied at cell midpoints)."""
    if b.base.kind is not PseudofunctionKind.XPLUSI0:
        raise UnsupportedExponentError("only the 1D power base has half-line grid data")
    lam = b.base.lam
    scale_x = b.boost.cosh if b.boost.regime is Regime.INSIDE else b.boost.sinh
    if scale_x <= 0:
        raise UnsupportedExponentError(
            "outside boosts with sign MINUS have no half-line data representation"
        )
    base = _dilated_xplusi0_data(lam, scale_x, grid)
    drift = b.boost.c if b.boost.regime is Regime.INSIDE else b.boost.sign.value * b.boost.c
    times = np.asarray(times, dtype=float)
    mids = grid.midpoints()
    values = np.empty((times.size, grid.bins), dtype=np.complex128)
    for k, t in enumerate(times):
        values[k] = base.samples * np.exp(TWO_PI * 1j * drift * t * mids)
    return SpaceTimeField(grid, times, values, grid.cutoff)
