import math

import numpy as np
import pytest

from conewave import (
    GridMismatchError,
    InvalidArgumentError,
    SpectralFunction,
    SpectralGrid,
    Tail,
    eval_physical,
    grid_make,
    indicator_spectrum,
    read_spectrum_csv,
    sobolev_norm,
    truncation_bound,
    write_spectrum_csv,
    xplusi0_spectrum,
)
from conewave.pseudofn import power_cell_averages


def test_grid_make_spacing():
    grid = grid_make(256.0, 2**14)
    assert grid.dxi == 2.0**-6
    grid = grid_make(1.0, 8)
    assert grid.dxi == 0.125


@pytest.mark.parametrize(
    "cutoff,bins",
    [(-1.0, 64), (0.0, 64), (256.0, 4), (256.0, 100), (256.0, 65)],
)
def test_grid_make_rejects(cutoff, bins):
    with pytest.raises(InvalidArgumentError):
        grid_make(cutoff, bins)


def test_grid_compatibility():
    a = grid_make(1.0, 64)
    b = grid_make(1.0, 128)
    with pytest.raises(GridMismatchError):
        a.require_compatible(b)


def test_sobolev_norm_indicator_l2():
    grid = grid_make(1.0, 2**10)
    f = indicator_spectrum(grid, 1.0)
    assert sobolev_norm(f, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_sobolev_norm_indicator_h1():
    # closed-form oracle: int_0^1 (1 + xi^2) dxi = 4/3
    grid = grid_make(1.0, 2**14)
    f = indicator_spectrum(grid, 1.0)
    assert sobolev_norm(f, 1.0) == pytest.approx(math.sqrt(4.0 / 3.0), abs=1e-3)


def test_sobolev_norm_infinite_for_flat_tail():
    # spectrum of the -1 power: constant with tail exponent 0; at s = -0.4
    # the tail integral diverges (2s + 2a = -0.8 >= -1)
    f = xplusi0_spectrum(-1.0, grid_make(64.0, 1024))
    assert sobolev_norm(f, -0.4) == math.inf
    assert sobolev_norm(f, -0.6) < math.inf


def test_eval_physical_at_zero():
    grid = grid_make(1.0, 2**10)
    f = indicator_spectrum(grid, 1.0)
    (value,) = eval_physical(f, [0.0])
    assert value == pytest.approx(1.0, abs=1e-10)


def test_eval_physical_oscillatory_against_reference_quadrature():
    grid = grid_make(1.0, 2**14)
    f = indicator_spectrum(grid, 1.0)
    x = 0.5
    closed_form = (np.exp(1j * math.pi) - 1.0) / (1j * math.pi)  # = 2i/pi
    xi = (np.arange(10**6) + 0.5) * 1e-6
    reference = np.sum(np.exp(2j * math.pi * x * xi)) * 1e-6
    (value,) = eval_physical(f, [x])
    assert abs(closed_form - reference) < 1e-10
    assert value == pytest.approx(closed_form, abs=1e-6)


def test_eval_physical_zero_samples_and_empty():
    grid = grid_make(1.0, 64)
    zero = SpectralFunction(grid, np.zeros(64))
    assert np.all(eval_physical(zero, [0.0, 0.3, -2.0]) == 0.0)
    assert eval_physical(zero, []).size == 0


def test_eval_physical_rejects_nan_and_far_points():
    grid = grid_make(1.0, 64)
    f = indicator_spectrum(grid, 1.0)
    with pytest.raises(InvalidArgumentError):
        eval_physical(f, [math.nan])
    with pytest.raises(InvalidArgumentError):
        eval_physical(f, [11.0 / grid.dxi])


def test_eval_physical_linear():
    rng = np.random.default_rng(7)
    grid = grid_make(4.0, 128)
    a = SpectralFunction(grid, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    b = SpectralFunction(grid, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    xs = rng.uniform(-3, 3, 11)
    lhs = eval_physical(a + b, xs)
    rhs = eval_physical(a, xs) + eval_physical(b, xs)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


def test_norm_monotone_in_s():
    rng = np.random.default_rng(42)
    grid = grid_make(8.0, 256)
    for _ in range(100):
        f = SpectralFunction(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
        s1, s2 = sorted(rng.uniform(-3, 3, 2))
        assert sobolev_norm(f, s1) <= sobolev_norm(f, s2) * (1 + 1e-12)


def test_norm_scaling():
    rng = np.random.default_rng(3)
    grid = grid_make(8.0, 256)
    f = SpectralFunction(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
    c = 2.75 - 0.5j
    assert sobolev_norm(f.scaled(c), 1.3) == pytest.approx(
        abs(c) * sobolev_norm(f, 1.3), rel=1e-12
    )


@pytest.mark.parametrize("a", [-0.1, 0.1])
def test_norm_refinement_first_order_from_origin_cell(a):
    # cell-averaged power-law spectra converge first order (origin cell);
    # the change per doubling should shrink by about a factor of two
    s = 0.7
    norms = []
    for bins in (2**10, 2**11, 2**12, 2**13):
        grid = grid_make(1.0, bins)
        f = SpectralFunction(grid, power_cell_averages(a, grid).astype(complex))
        norms.append(sobolev_norm(f, s))
    d1 = abs(norms[1] - norms[0])
    d2 = abs(norms[2] - norms[1])
    d3 = abs(norms[3] - norms[2])
    assert 1.5 <= d1 / d2 <= 2.5
    assert 1.5 <= d2 / d3 <= 2.5


def test_tail_continuity_enforced():
    grid = grid_make(2.0, 64)
    samples = np.ones(64)
    SpectralFunction(grid, samples, Tail(1.0 + 0j, 0.0))  # consistent
    with pytest.raises(InvalidArgumentError):
        SpectralFunction(grid, samples, Tail(2.0 + 0j, 0.0))


def test_tail_truncation_bound():
    f = xplusi0_spectrum(-2.0, grid_make(64.0, 1024))
    assert truncation_bound(f) == math.inf  # tail exponent +1 never integrable
    g = SpectralFunction(
        grid_make(2.0, 64),
        np.full(64, 0.25 + 0j) * (grid_make(2.0, 64).midpoints() ** -2.0),
        None,
    )
    assert truncation_bound(g) == 0.0


def test_samples_immutable():
    grid = grid_make(1.0, 64)
    f = indicator_spectrum(grid)
    with pytest.raises(ValueError):
        f.samples[0] = 5.0


def test_csv_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(11)
    grid = grid_make(256.0, 2**10)
    f = SpectralFunction(
        grid,
        rng.standard_normal(2**10) * np.exp(1j * rng.uniform(0, 2 * np.pi, 2**10)),
        None,
        trust=64.0,
    )
    path = tmp_path / "spec.csv"
    write_spectrum_csv(f, path)
    g = read_spectrum_csv(path)
    assert g.grid.compatible(f.grid)
    assert np.array_equal(g.samples, f.samples)
    assert g.trust == f.trust

    h = xplusi0_spectrum(-1.5, grid)
    write_spectrum_csv(h, path)
    h2 = read_spectrum_csv(path)
    assert np.array_equal(h2.samples, h.samples)
    assert h2.tail == h.tail
