"""Radial power pseudofunctions |x|**lam in dimension n >= 2.

In the locally integrable range -n < lam < 0 (poles excluded) the transform
is the closed-form radial profile

    pi**(-lam - n/2) * Gamma((lam+n)/2) / Gamma(-lam/2) * rho**(-lam - n),

products are plain pointwise products (|x|**lam * |x|**mu = |x|**(lam+mu)
whenever lam + mu > -n), and the elliptic identity

    Laplace(|x|**lam) = lam * (lam + n - 2) * |x|**(lam-2)

supplies stationary solutions of u_tt - Laplace(u) = kappa * u^p with
lam = 2/(1-p) and kappa = -lam*(lam+n-2).  For n = 1 the same kappa formula
reduces to -lam*(lam-1), the coefficient of the 1D power family; the report
keeps both values visible because they differ for n >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, SingularPointError, StepTooCoarseError
from .pseudofn import _check_radial_exponent

__all__ = [
    "RadialSpec",
    "rlambda_eval",
    "rlambda_ft_profile",
    "product_exists",
    "power_valid",
    "laplacian_identity_check",
    "StationaryParams",
    "stationary_params_nd",
]


@dataclass(frozen=True)
class RadialSpec:
    lam: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidArgumentError("radial pseudofunctions need integer dimension n >= 2")
        _check_radial_exponent(self.lam, self.n)


def rlambda_eval(spec: RadialSpec, x) -> float:
    """|x|**lam at a nonzero point of R^n."""
    xa = np.asarray(x, dtype=float)
    if xa.shape != (spec.n,):
        raise InvalidArgumentError(f"point must have dimension {spec.n}")
    r = math.sqrt(float(np.sum(xa * xa)))
    if r == 0.0:
        raise SingularPointError("|x|**lam is singular at the origin")
    return r**spec.lam


def rlambda_ft_profile(spec: RadialSpec, rho: float) -> float:
    """Radial profile of the transform at frequency radius rho > 0."""
    if not rho > 0:
        raise InvalidArgumentError("rho must be positive")
    lam, n = spec.lam, spec.n
    const = math.pi ** (-lam - n / 2.0) * math.gamma((lam + n) / 2.0) / math.gamma(-lam / 2.0)
    return const * rho ** (-lam - n)


def product_exists(lam: float, mu: float, n: int) -> bool:
    """Whether the product of the lam- and mu-powers exists in dimension n."""
    RadialSpec(lam, n)
    RadialSpec(mu, n)
    return lam + mu > -n


def power_valid(lam: float, p: int, n: int) -> bool:
    """Whether the pointwise power rule (|x|**lam)**p = |x|**(lam p) applies."""
    if not isinstance(p, int) or p < 1:
        raise InvalidArgumentError("p must be a positive integer")
    return lam * p > -n


def laplacian_identity_check(spec: RadialSpec, r: float, h: float) -> float:
    """Relative error of the radial FD Laplacian against lam(lam+n-2) r**(lam-2).

    Second-order centered differences for u'' and u'; r must exceed 10 h so
    the stencil stays clear of the origin.
    """
    if not (h > 0 and r > 10.0 * h):
        raise StepTooCoarseError(f"need r > 10 h (got r = {r}, h = {h})")
    lam, n = spec.lam, spec.n
    up, u0, um = (r + h) ** lam, r**lam, (r - h) ** lam
    d2 = (up - 2.0 * u0 + um) / (h * h)
    d1 = (up - um) / (2.0 * h)
    fd = d2 + (n - 1) / r * d1
    exact = lam * (lam + n - 2.0) * r ** (lam - 2.0)
    return abs(fd - exact) / abs(exact)


@dataclass(frozen=True)
class StationaryParams:
    """Exponent/coefficient pair making |x|**lam a stationary solution."""

    p: int
    n: int
    feasible: bool
    lam: Fraction
    kappa: Fraction | None  # -lam*(lam+n-2); None when infeasible
    kappa_1d_form: Fraction  # -lam*(lam-1), the n = 1 coefficient, for comparison
    power_rule_ok: bool | None
    minimal_n: int | None  # smallest n >= 2 making the pair feasible

    def summary(self) -> str:
        if not self.feasible:
            return (
                f"p={self.p} n={self.n}: infeasible (lam={self.lam} <= {2 - self.n}); "
                f"minimal feasible n = {self.minimal_n}"
            )
        return (
            f"p={self.p} n={self.n}: lam={self.lam} kappa={self.kappa} "
            f"(1d-form coefficient {self.kappa_1d_form}) power_rule_ok={self.power_rule_ok}"
        )


def stationary_params_nd(p: int, n: int) -> StationaryParams:
    """Parameters of the stationary power solution in dimension n.

    lam = 2/(1-p) always; for n >= 2 feasibility needs lam > 2 - n (so the
    power target |x|**(lam-2) stays locally integrable), while n = 1 is
    always feasible through the boundary-value power family.  kappa comes
    from the elliptic identity, kappa = -lam*(lam+n-2); the n = 1 reduction
    -lam*(lam-1) is reported alongside since the two differ for n >= 2.
    """
    if not isinstance(p, int) or p < 2:
        raise InvalidArgumentError("p must be an integer >= 2")
    if not isinstance(n, int) or n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    lam = Fraction(2, 1 - p)
    kappa_1d = -lam * (lam - 1)
    feasible = n == 1 or lam > 2 - n
    if not feasible:
        minimal = 2
        while not lam > 2 - minimal:
            minimal += 1
        return StationaryParams(p, n, False, lam, None, kappa_1d, None, minimal)
    kappa = -lam * (lam + n - 2)
    ok = power_valid(float(lam), p, n) if n >= 2 else True
    return StationaryParams(p, n, True, lam, kappa, kappa_1d, ok, None)
