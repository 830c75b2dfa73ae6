import cmath
import math

import numpy as np
import pytest

from conewave import (
    InvalidArgumentError,
    PseudofunctionKind,
    PseudofunctionSpec,
    UnsupportedExponentError,
    eval_physical,
    grid_make,
    sobolev_membership,
    sobolev_norm,
    spectrum_amplitude,
    xplusi0_eval,
    xplusi0_spectrum,
)


def test_amplitude_closed_forms():
    # independent evaluation of (2pi)^-lam / Gamma(-lam) * exp(i lam pi/2)
    assert spectrum_amplitude(-1.0) == pytest.approx(-2j * math.pi, rel=1e-14)
    assert spectrum_amplitude(-2.0) == pytest.approx(-4 * math.pi**2 + 0j, rel=1e-14)
    lam = -1.5
    expected = (2 * math.pi) ** 1.5 / math.gamma(1.5) * cmath.exp(-0.75j * math.pi)
    assert spectrum_amplitude(lam) == pytest.approx(expected, rel=1e-14)


def test_spectrum_of_minus_one_is_constant():
    grid = grid_make(64.0, 1024)
    f = xplusi0_spectrum(-1.0, grid)
    assert np.allclose(f.samples, -2j * math.pi, rtol=1e-14)
    assert f.tail.amplitude == pytest.approx(-2j * math.pi)
    assert f.tail.exponent == 0.0


def test_spectrum_of_minus_two_is_linear():
    grid = grid_make(64.0, 1024)
    f = xplusi0_spectrum(-2.0, grid)
    # cell average of a linear density equals its midpoint value
    assert np.allclose(f.samples, -4 * math.pi**2 * grid.midpoints(), rtol=1e-13)
    assert f.tail == (pytest.approx(-4 * math.pi**2 + 0j), 1.0)


def test_spectrum_rejects_nonnegative_lam():
    with pytest.raises(UnsupportedExponentError):
        xplusi0_spectrum(0.5, grid_make(1.0, 64))
    with pytest.raises(UnsupportedExponentError):
        xplusi0_spectrum(0.0, grid_make(1.0, 64))


def test_eval_limits():
    assert xplusi0_eval(-2.0, 1.0, 1e-8) == pytest.approx(1.0, abs=1e-7)
    assert xplusi0_eval(-1.0, -1.0, 1e-8) == pytest.approx(-1.0, abs=1e-7)
    assert xplusi0_eval(-2.0, -1.0, 1e-8) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(InvalidArgumentError):
        xplusi0_eval(-1.0, 0.5, 0.0)


def test_membership_examples():
    assert sobolev_membership(-2.0, -1.6, 1, local=True)
    assert not sobolev_membership(-2.0, -1.5, 1, local=True)  # strict inequality
    assert not sobolev_membership(-0.4, -10.0, 1, local=False)
    with pytest.raises(UnsupportedExponentError):
        sobolev_membership(0.5, 0.0, 1, local=True)


def test_membership_matches_tail_norm_rule():
    # the tail-integral finiteness rule 2s + 2a < -1 with a = -lam - 1 is
    # exactly the local membership inequality s < lam + 1/2
    grid = grid_make(64.0, 1024)
    for lam in (-2.0, -1.25, -0.75):
        f = xplusi0_spectrum(lam, grid)
        for ds in (-0.1, -1e-9, 1e-9, 0.1):
            s = lam + 0.5 + ds
            finite = sobolev_norm(f, s) < math.inf
            assert finite == sobolev_membership(lam, s, 1, local=True)


def test_membership_radial_rule():
    assert sobolev_membership(-2.0, -0.6, 3, local=True)
    assert not sobolev_membership(-2.0, -0.5, 3, local=True)
    assert not sobolev_membership(-1.0, -2.0, 3, local=False)  # lam >= -n/2
    assert sobolev_membership(-2.0, -0.6, 3, local=False)


def test_spec_validation():
    PseudofunctionSpec(PseudofunctionKind.XPLUSI0, -2.0)
    with pytest.raises(InvalidArgumentError):
        PseudofunctionSpec(PseudofunctionKind.XPLUSI0, -2.0, n=3)
    PseudofunctionSpec(PseudofunctionKind.RADIAL, -2.0, n=3)
    with pytest.raises(InvalidArgumentError):
        PseudofunctionSpec(PseudofunctionKind.RADIAL, -3.0, n=3)  # pole -n - 2k
    with pytest.raises(InvalidArgumentError):
        PseudofunctionSpec(PseudofunctionKind.RADIAL, -3.5, n=3)  # below -n


def test_sample_homogeneity():
    # sample ratios follow the midpoint power law up to cell-average correction
    grid = grid_make(64.0, 2**12)
    mids = grid.midpoints()
    for lam in (-2.0, -1.5, -1.25):
        f = xplusi0_spectrum(lam, grid)
        j, k = 100, 900
        expected = (mids[j] / mids[k]) ** (-lam - 1.0)
        assert abs(f.samples[j] / f.samples[k] - expected) < 1e-3 * abs(expected)


def test_transform_evaluation_duality():
    """Physical evaluation of the damped spectrum matches the regularized power.

    The undamped truncated integral has a divergent oscillatory boundary
    term, so the duality is checked on the spectrum of the eps-regularized
    power, whose density carries exp(-2 pi eps xi); eps = 4/cutoff balances
    regularization against truncation.
    """
    lam = -2.0
    grid = grid_make(256.0, 2**16)
    eps = 4.0 / grid.cutoff
    f = xplusi0_spectrum(lam, grid)
    damped = f.scaled(1.0)  # copy
    damped = type(f)(grid, f.samples * np.exp(-2 * math.pi * eps * grid.midpoints()), None)
    for x in (1.0, -1.0, 2.0, -2.0):
        (value,) = eval_physical(damped, [x])
        target = xplusi0_eval(lam, x, eps)
        assert abs(value - target) <= 0.02 * abs(target)
