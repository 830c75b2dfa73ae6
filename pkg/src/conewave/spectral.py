"""Grid representation of half-line-supported spectra.

A spectrum lives on the frequency half-line [0, inf).  The grid covers
[0, cutoff] with ``bins`` uniform cells; stored samples are *cell averages*
of the spectral density over each cell ``[k*dxi, (k+1)*dxi]``.  Cell
averaging keeps power-law densities ``xi**a`` with ``a`` in (-1, 0) finite
in the first cell, so downstream quadrature is uniformly first order and
never touches the xi = 0 singularity.

Content above the cutoff can be recorded as an analytic power-law tail
``A * xi**a``; norms then decide finiteness exactly instead of through
truncation artifacts.

All reductions use numpy's pairwise summation on arrays in fixed index
order, which is deterministic across runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import GridMismatchError, InvalidArgumentError

__all__ = [
    "SpectralGrid",
    "SpectralFunction",
    "Tail",
    "grid_make",
    "indicator_spectrum",
    "sobolev_norm",
    "eval_physical",
    "truncation_bound",
    "write_spectrum_csv",
    "read_spectrum_csv",
]

#: Sobolev exponents are plain real numbers.
SobolevIndex = float

# Relative slack allowed between the last stored cell average and the tail
# formula evaluated at the last cell midpoint.
_TAIL_CONTINUITY_RTOL = 1e-2


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform grid of ``bins`` cells covering the frequency interval [0, cutoff]."""

    cutoff: float
    bins: int

    def __post_init__(self):
        if not (isinstance(self.cutoff, (int, float)) and math.isfinite(self.cutoff) and self.cutoff > 0):
            raise InvalidArgumentError(f"grid cutoff must be a positive finite real, got {self.cutoff!r}")
        if not isinstance(self.bins, int) or self.bins < 8:
            raise InvalidArgumentError(f"grid needs at least 8 bins, got {self.bins!r}")
        if self.bins & (self.bins - 1) != 0:
            raise InvalidArgumentError(
                f"bins must be a power of two (refinement studies halve/double), got {self.bins}"
            )
        object.__setattr__(self, "cutoff", float(self.cutoff))

    @property
    def dxi(self) -> float:
        return self.cutoff / self.bins

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.bins) + 0.5) * self.dxi

    def edges(self) -> np.ndarray:
        return np.arange(self.bins + 1) * self.dxi

    def compatible(self, other: "SpectralGrid") -> bool:
        return self.cutoff == other.cutoff and self.bins == other.bins

    def require_compatible(self, other: "SpectralGrid") -> None:
        if not self.compatible(other):
            raise GridMismatchError(
                f"incompatible grids: (cutoff={self.cutoff}, bins={self.bins}) vs "
                f"(cutoff={other.cutoff}, bins={other.bins})"
            )


def grid_make(cutoff: float, bins: int) -> SpectralGrid:
    """Build a spectral grid with exact spacing cutoff/bins."""
    return SpectralGrid(cutoff, bins)


class Tail(NamedTuple):
    """Analytic tail ``amplitude * xi**exponent`` asserted for xi > cutoff."""

    amplitude: complex
    exponent: float


@dataclass(frozen=True)
class SpectralFunction:
    """Cell-averaged spectrum on a grid, with optional analytic tail.

    ``trust`` is the upper frequency below which the samples are
    uncontaminated by truncated input tails.  Fresh constructor output is
    trusted on the whole grid; one-sided products halve the trusted band.
    """

    grid: SpectralGrid
    samples: np.ndarray
    tail: Tail | None = None
    trust: float = field(default=math.nan)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.bins,):
            raise InvalidArgumentError(
                f"samples shape {samples.shape} does not match grid bins {self.grid.bins}"
            )
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        trust = self.grid.cutoff if math.isnan(self.trust) else float(self.trust)
        if not (0.0 < trust <= self.grid.cutoff):
            raise InvalidArgumentError(f"trust band edge {trust} outside (0, cutoff]")
        object.__setattr__(self, "trust", trust)
        if self.tail is not None:
            tail = Tail(complex(self.tail[0]), float(self.tail[1]))
            object.__setattr__(self, "tail", tail)
            self._check_tail_continuity()

    def _check_tail_continuity(self) -> None:
        amp, expo = self.tail
        if amp == 0:
            return
        xi_last = (self.grid.bins - 0.5) * self.grid.dxi
        predicted = amp * xi_last**expo
        bound = _TAIL_CONTINUITY_RTOL * abs(amp) * self.grid.cutoff**expo
        if abs(self.samples[-1] - predicted) > bound:
            raise InvalidArgumentError(
                "tail does not continue the stored samples: last cell average "
                f"{self.samples[-1]} vs tail value {predicted} (allowed deviation {bound})"
            )

    def with_trust(self, trust: float) -> "SpectralFunction":
        return SpectralFunction(self.grid, self.samples, self.tail, trust)

    def scaled(self, factor: complex) -> "SpectralFunction":
        tail = None if self.tail is None else Tail(self.tail.amplitude * factor, self.tail.exponent)
        return SpectralFunction(self.grid, self.samples * factor, tail, self.trust)

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        # a tail claim survives only when both operands carry tails of equal
        # exponent; anything else would assert unknown content past the cutoff
        self.grid.require_compatible(other.grid)
        tail = None
        if self.tail is not None and other.tail is not None and self.tail.exponent == other.tail.exponent:
            tail = Tail(self.tail.amplitude + other.tail.amplitude, self.tail.exponent)
        return SpectralFunction(self.grid, self.samples + other.samples,
                                tail, min(self.trust, other.trust))

    def __sub__(self, other: "SpectralFunction") -> "SpectralFunction":
        return self + other.scaled(-1.0)


def indicator_spectrum(grid: SpectralGrid, upper: float = 1.0) -> SpectralFunction:
    """Cell averages of the indicator of [0, upper] (no tail)."""
    if not (0 < upper):
        raise InvalidArgumentError("indicator upper edge must be positive")
    edges = grid.edges()
    covered = np.clip(upper - edges[:-1], 0.0, grid.dxi)
    return SpectralFunction(grid, covered / grid.dxi)


def _bracket_weight(mids: np.ndarray, s: float) -> np.ndarray:
    # <xi>^{2s} with the exact bracket (1 + xi^2)^{1/2}
    return (1.0 + mids * mids) ** s


def sobolev_norm(f: SpectralFunction, s: SobolevIndex, upper: float | None = None) -> float:
    """H^s norm of a half-line spectrum.

    Grid part: ``(sum_k |samples[k]|^2 <xi_k>^{2s} dxi)^(1/2)`` over cell
    midpoints, pairwise-summed in index order.  If a tail is present and no
    band clamp is requested, the tail integral is added in the closed form
    obtained with <xi> ~ xi,

        T = |A|^2 * cutoff^(2a+2s+1) / -(2a+2s+1),

    valid when 2s + 2a < -1; otherwise the norm is infinite and
    ``math.inf`` is returned (a distinguished outcome, not an exception).
    The bracket substitution in T carries a relative error bounded by
    (1 + cutoff^-2)^|s|.

    ``upper`` clamps the integration to cell midpoints <= upper and ignores
    the tail; products and the wave solver use it for trust-band norms.
    """
    mids = f.grid.midpoints()
    mags = np.abs(f.samples) ** 2
    if upper is not None:
        sel = mids <= upper
        mids = mids[sel]
        mags = mags[sel]
    total = float(np.sum(mags * _bracket_weight(mids, float(s)) * f.grid.dxi))
    if upper is None and f.tail is not None and f.tail.amplitude != 0:
        expo = 2.0 * f.tail.exponent + 2.0 * float(s)
        if expo >= -1.0:
            return math.inf
        total += abs(f.tail.amplitude) ** 2 * f.grid.cutoff ** (expo + 1.0) / (-(expo + 1.0))
    return math.sqrt(total)


def eval_physical(f: SpectralFunction, points: Sequence[float]) -> np.ndarray:
    """Evaluate ``int_0^cutoff fhat(xi) exp(2 pi i x xi) dxi`` by cell quadrature.

    The quadrature pairs each stored cell average with the phase at the cell
    midpoint (the trapezoid analogue for cell-averaged data); the analytic
    tail is ignored, see :func:`truncation_bound` for the committed error.
    Points beyond 10/dxi are rejected: there the quadrature cannot resolve
    the phase oscillation across one cell.
    """
    xs = np.asarray(points, dtype=float)
    if xs.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if not np.all(np.isfinite(xs)):
        raise InvalidArgumentError("evaluation points must be finite")
    limit = 10.0 / f.grid.dxi
    if np.any(np.abs(xs) > limit):
        raise InvalidArgumentError(f"|x| beyond quadrature-resolvable range {limit}")
    mids = f.grid.midpoints()
    out = np.empty(xs.shape, dtype=np.complex128)
    weighted = f.samples * f.grid.dxi
    # chunked pairwise reduction, no BLAS involved
    for start in range(0, xs.size, 64):
        chunk = xs.flat[start : start + 64]
        phases = np.exp(2j * np.pi * np.outer(mids, chunk))
        out.flat[start : start + 64] = np.sum(weighted[:, None] * phases, axis=0)
    return out


def truncation_bound(f: SpectralFunction) -> float:
    """Bound on the physical-space error from ignoring the tail in quadrature.

    Returns ``int_cutoff^inf |A| xi^a dxi`` (infinite when a >= -1).
    """
    if f.tail is None or f.tail.amplitude == 0:
        return 0.0
    a = f.tail.exponent
    if a >= -1.0:
        return math.inf
    return abs(f.tail.amplitude) * f.grid.cutoff ** (a + 1.0) / (-(a + 1.0))


# ---------------------------------------------------------------------------
# CSV serialization: header `xi,re,im`, one row per cell midpoint, optional
# trailing comments `# tail A_re A_im a` and `# trust value`.  Floats are
# written with repr(), which round-trips float64 exactly.


def _fmt(x: float) -> str:
    return repr(float(x))


def write_spectrum_csv(f: SpectralFunction, path) -> None:
    lines = ["xi,re,im"]
    mids = f.grid.midpoints()
    for xi, v in zip(mids, f.samples):
        lines.append(f"{_fmt(xi)},{_fmt(v.real)},{_fmt(v.imag)}")
    if f.tail is not None:
        amp, expo = f.tail
        lines.append(f"# tail {_fmt(amp.real)} {_fmt(amp.imag)} {_fmt(expo)}")
    if f.trust != f.grid.cutoff:
        lines.append(f"# trust {_fmt(f.trust)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spectrum_csv(path) -> SpectralFunction:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "xi,re,im":
        raise InvalidArgumentError(f"{path}: expected spectrum CSV header 'xi,re,im'")
    xi, vals = [], []
    tail = None
    trust = None
    for ln in lines[1:]:
        if ln.startswith("# tail "):
            a_re, a_im, expo = (float(tok) for tok in ln[len("# tail ") :].split())
            tail = Tail(complex(a_re, a_im), expo)
        elif ln.startswith("# trust "):
            trust = float(ln[len("# trust ") :])
        elif ln.startswith("#"):
            continue
        else:
            sx, sre, sim = ln.split(",")
            xi.append(float(sx))
            vals.append(complex(float(sre), float(sim)))
    n = len(xi)
    if n == 0:
        raise InvalidArgumentError(f"{path}: no data rows")
    cutoff = xi[0] + xi[-1]  # first midpoint + last midpoint = bins * dxi
    grid = SpectralGrid(cutoff, n)
    return SpectralFunction(grid, np.asarray(vals), tail,
                            grid.cutoff if trust is None else trust)
