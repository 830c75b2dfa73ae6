"""Boundary-value power distributions on the line and their half-line spectra.

The family handled here is the boundary value of ``z**lam`` from the upper
half plane, regularized as

    (x**2 + eps**2)**(lam/2) * exp(i * lam * arg(x + i*eps)),   eps -> 0.

For lam < 0 its spectrum is the locally integrable half-line density

    C(lam) * xi**(-lam-1),    C(lam) = (2*pi)**(-lam) / Gamma(-lam) * exp(i*lam*pi/2),

which this module samples exactly (cell averages in closed form).
Nonnegative lam would require finite-part regularization and is rejected.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnsupportedExponentError
from .spectral import SpectralFunction, SpectralGrid, Tail

__all__ = [
    "PseudofunctionKind",
    "PseudofunctionSpec",
    "spectrum_amplitude",
    "power_cell_averages",
    "xplusi0_spectrum",
    "xplusi0_eval",
    "sobolev_membership",
]


class PseudofunctionKind(enum.Enum):
    XPLUSI0 = "xplusi0"
    RADIAL = "radial"


def _check_radial_exponent(lam: float, n: int) -> None:
    if not (-n < lam < 0):
        raise InvalidArgumentError(f"radial exponent must satisfy -{n} < lam < 0, got {lam}")
    t = -(lam + n)
    if t >= 0 and t == int(t) and int(t) % 2 == 0:
        raise InvalidArgumentError(f"lam = {lam} is a pole (-n - 2k family) of the transform formula")
    if lam >= 0 and lam == int(lam) and int(lam) % 2 == 0:
        raise InvalidArgumentError(f"lam = {lam} excluded (even nonnegative integer)")


@dataclass(frozen=True)
class PseudofunctionSpec:
    """Parameters (kind, lam, n) naming one pseudofunction."""

    kind: PseudofunctionKind
    lam: float
    n: int = 1

    def __post_init__(self):
        if self.kind is PseudofunctionKind.XPLUSI0:
            if self.n != 1:
                raise InvalidArgumentError("x+i0 powers are one-dimensional objects (n must be 1)")
            if not self.lam < 0:
                raise UnsupportedExponentError(
                    f"lam = {self.lam}: only lam < 0 is supported (locally integrable spectrum)"
                )
        else:
            if self.n < 2:
                raise InvalidArgumentError("radial kind needs dimension n >= 2")
            _check_radial_exponent(self.lam, self.n)


def spectrum_amplitude(lam: float) -> complex:
    """Amplitude C(lam) of the half-line spectral density of (x+i0)**lam."""
    if not lam < 0:
        raise UnsupportedExponentError(f"lam = {lam}: need lam < 0")
    return (2.0 * math.pi) ** (-lam) / math.gamma(-lam) * cmath.exp(1j * lam * math.pi / 2.0)


def power_cell_averages(exponent: float, grid: SpectralGrid) -> np.ndarray:
    """Exact cell averages of xi**exponent over the grid cells (exponent > -1).

    Uses ((k+1)**b - k**b) = k**b * expm1(b*log1p(1/k)) to avoid the
    cancellation in the naive difference at large k.
    """
    if exponent <= -1.0:
        raise InvalidArgumentError(f"xi**{exponent} is not integrable at 0")
    b = exponent + 1.0
    k = np.arange(grid.bins, dtype=float)
    diff = np.empty(grid.bins)
    diff[0] = 1.0
    kk = k[1:]
    diff[1:] = kk**b * np.expm1(b * np.log1p(1.0 / kk))
    return grid.dxi**exponent * diff / b


def xplusi0_spectrum(lam: float, grid: SpectralGrid) -> SpectralFunction:
    """Spectrum of (x+i0)**lam: exact cell averages of C(lam) xi**(-lam-1),
    with the analytic tail (C(lam), -lam-1) attached."""
    amp = spectrum_amplitude(lam)
    a = -lam - 1.0
    return SpectralFunction(grid, amp * power_cell_averages(a, grid), Tail(amp, a))


def xplusi0_eval(lam: float, x, eps: float):
    """Pointwise regularized evaluation of (x+i0)**lam at offset eps > 0.

    Returns (x^2+eps^2)^(lam/2) * exp(i lam arg(x+i eps)); the argument lies
    in (0, pi).  The eps -> 0 limit at x = 0 diverges like eps**lam for
    lam < 0 and is left to callers.
    """
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    xa = np.asarray(x, dtype=float)
    out = (xa * xa + eps * eps) ** (lam / 2.0) * np.exp(1j * lam * np.arctan2(eps, xa))
    return out if xa.shape else complex(out)


def sobolev_membership(lam: float, s: float, n: int = 1, local: bool = True) -> bool:
    """Membership of the lam-power pseudofunction in H^s (local or global).

    Local: s < lam + n/2.  Global additionally needs lam < -n/2.  The
    inequalities are strict; equality is outside the space.
    """
    if not lam < 0:
        raise UnsupportedExponentError(f"lam = {lam}: need lam < 0")
    if n < 1:
        raise InvalidArgumentError("dimension must be a positive integer")
    inside = s < lam + n / 2.0
    if local:
        return inside
    return lam < -n / 2.0 and inside
