import math

import numpy as np
import pytest

from conewave import (
    CauchyData,
    DivergenceError,
    InvalidArgumentError,
    SpectralFunction,
    constant_field,
    duhamel_apply,
    fourier_product,
    grid_make,
    linear_field,
    picard_solve,
    residual,
    residual_profile,
    sobolev_norm,
    xplusi0_spectrum,
)
from conewave.wavesolver import SpaceTimeField, write_field_csv

TWO_PI = 2.0 * math.pi


def exp_data(grid, rate=1.0):
    edges = grid.edges()
    cells = (np.exp(-rate * edges[:-1]) - np.exp(-rate * edges[1:])) / (rate * grid.dxi)
    return CauchyData.rest(SpectralFunction(grid, cells))


def test_linear_propagator_is_exact_cosine():
    grid = grid_make(8.0, 64)
    data = exp_data(grid)
    times = np.linspace(0.0, 1.0, 9)
    field = linear_field(data, times)
    zero = CauchyData.rest(SpectralFunction(grid, np.zeros(64)))
    via_duhamel = duhamel_apply(field, data, 2, 0.0)
    omega = TWO_PI * grid.midpoints()
    for k, t in enumerate(times):
        expected = np.cos(omega * t) * data.u0.samples
        assert np.array_equal(field.values[k], expected)
        assert np.allclose(via_duhamel.values[k], expected, rtol=0, atol=1e-14)


def test_velocity_data_vanishes_at_time_zero():
    grid = grid_make(8.0, 64)
    u1 = SpectralFunction(grid, np.ones(64))
    zero = SpectralFunction(grid, np.zeros(64))
    data = CauchyData(zero, u1)
    times = np.linspace(0.0, 1.0, 9)
    field = linear_field(data, times)
    assert np.all(field.values[0] == 0.0)
    assert not np.all(field.values[3] == 0.0)


def test_duhamel_affine_in_data():
    rng = np.random.default_rng(2)
    grid = grid_make(8.0, 64)
    mk = lambda: SpectralFunction(grid, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    data = CauchyData(mk(), mk())
    zero_data = CauchyData(SpectralFunction(grid, np.zeros(64)), SpectralFunction(grid, np.zeros(64)))
    times = np.linspace(0.0, 0.5, 9)
    field = SpaceTimeField(grid, times, np.stack([mk().samples for _ in times]))
    full = duhamel_apply(field, data, 2, -3.0)
    forced = duhamel_apply(field, zero_data, 2, -3.0)
    lin = linear_field(data, times)
    diff = full.values - forced.values - lin.values
    scale = np.abs(full.values).max()
    assert np.abs(diff).max() < 1e-12 * scale


def test_stationary_spectral_identity():
    # oracle for the fixed-point test: 4 pi^2 xi^2 u0hat = kappa (u0hat * u0hat)
    grid = grid_make(64.0, 2**12)
    u0 = xplusi0_spectrum(-2.0, grid)
    conv = fourier_product(u0, u0)
    mids = grid.midpoints()
    lhs = (TWO_PI * mids) ** 2 * u0.samples
    rhs = -6.0 * conv.samples
    band = mids <= conv.trust
    scale = np.abs(lhs[band]).max()
    assert np.abs((lhs - rhs)[band]).max() < 1e-9 * scale


def _stationary_setup(grid, nt, T):
    u0 = xplusi0_spectrum(-2.0, grid)
    data = CauchyData.rest(u0)
    times = np.linspace(0.0, T, nt + 1)
    return u0, data, constant_field(u0, times)


def _sup_rel_dev(mapped, field, sigma, band):
    dev, scale = 0.0, 0.0
    for k in range(field.times.size):
        d = SpectralFunction(field.grid, mapped.values[k] - field.values[k])
        ref = SpectralFunction(field.grid, field.values[k])
        dev = max(dev, sobolev_norm(d, sigma, upper=band))
        scale = max(scale, sobolev_norm(ref, sigma, upper=band))
    return dev / scale


def test_stationary_solution_is_duhamel_fixed_point():
    grid = grid_make(64.0, 2**12)
    u0, data, field = _stationary_setup(grid, 32, 0.5)
    mapped = duhamel_apply(field, data, 2, -6.0)
    rel = _sup_rel_dev(mapped, field, -2.0, mapped.trust)
    assert rel < 1e-3

    # the kernel frequency must be 2 pi xi; with omega = xi the same test
    # fails by far more than two orders of magnitude
    wrong = duhamel_apply(field, data, 2, -6.0, omega_scale=1.0)
    rel_wrong = _sup_rel_dev(wrong, field, -2.0, mapped.trust)
    assert rel_wrong > 100 * max(rel, 1e-3)


def test_residual_zero_field():
    grid = grid_make(8.0, 64)
    times = np.linspace(0.0, 1.0, 9)
    field = SpaceTimeField(grid, times, np.zeros((9, 64), dtype=complex))
    assert residual(field, 2, 1.0) == 0.0


def test_residual_stationary_field():
    grid = grid_make(64.0, 2**12)
    _, _, field = _stationary_setup(grid, 32, 0.5)
    assert residual(field, 2, -6.0, sigma=-2.0) < 1e-3
    assert residual(field, 2, -6.0, sigma=-2.0, omega_scale=1.0) > 0.1


def test_residual_linear_second_order_in_dt():
    # kappa = 0 evolution is exact; the residual measures the centered
    # second-difference error, which quarters under dt halving
    grid = grid_make(8.0, 128)
    data = exp_data(grid)
    res = []
    for nt in (32, 64, 128):
        field = linear_field(data, np.linspace(0.0, 0.5, nt + 1))
        res.append(residual(field, 2, 0.0, sigma=0.0))
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.2)
    assert res[1] / res[2] == pytest.approx(4.0, rel=0.2)


def test_residual_requires_two_steps():
    grid = grid_make(8.0, 64)
    with pytest.raises(InvalidArgumentError):
        SpaceTimeField(grid, [0.0, 1.0], np.zeros((2, 64), dtype=complex))


def test_picard_zero_data():
    grid = grid_make(8.0, 64)
    zero = SpectralFunction(grid, np.zeros(64))
    data = CauchyData(zero, zero)
    field, report = picard_solve(data, 2, 1.0, T=0.5, nt=8, tol=1e-12, max_iter=5)
    assert report.converged and report.iterations == 1
    assert np.all(field.values == 0.0)


def test_picard_contraction_small_time():
    grid = grid_make(32.0, 2**10)
    data = exp_data(grid)
    field, report = picard_solve(data, 2, 1.0, T=0.1, nt=32, tol=1e-8, max_iter=12)
    assert report.converged
    assert report.iterations <= 12
    assert all(r < 0.5 for r in report.ratios)
    assert report.ball_ok


def test_picard_long_time_flagged():
    grid = grid_make(16.0, 256)
    data = exp_data(grid)
    try:
        field, report = picard_solve(data, 2, 1.0, T=50.0, nt=64, tol=1e-8, max_iter=8)
        assert not report.converged  # non-silent outcome either way
    except DivergenceError as exc:
        assert exc.iteration is not None


def test_picard_warns_below_wellposed_threshold():
    grid = grid_make(16.0, 256)
    data = exp_data(grid)
    _, report = picard_solve(data, 3, 1.0, T=0.05, nt=16, tol=1e-8, max_iter=12, norm_s=-0.3)
    assert report.warnings  # s = -0.3 < 0 = threshold for p = 3


def test_per_mode_energy_conservation_linear():
    grid = grid_make(8.0, 64)
    data = exp_data(grid)
    omega = TWO_PI * grid.midpoints()
    drifts = []
    for nt in (64, 128):
        times = np.linspace(0.0, 1.0, nt + 1)
        field = linear_field(data, times)
        dt = field.dt
        dvals = (field.values[1:] - field.values[:-1]) / dt
        avg = 0.5 * (field.values[1:] + field.values[:-1])
        energy = np.abs(dvals) ** 2 + (omega * np.abs(avg)) ** 2
        e_mean = energy.mean(axis=0)
        drift = np.max((energy.max(axis=0) - energy.min(axis=0)) / e_mean)
        drifts.append(drift / dt**2)
    # measured constant stable under dt halving
    assert drifts[0] == pytest.approx(drifts[1], rel=0.2)


def test_local_lipschitz_in_data():
    grid = grid_make(32.0, 2**10)
    data = exp_data(grid)
    base, _ = picard_solve(data, 2, 1.0, T=0.1, nt=32, tol=1e-10, max_iter=20)
    pert_dir = SpectralFunction(grid, np.exp(-2.0 * grid.midpoints()))
    pert_dir = pert_dir.scaled(1.0 / sobolev_norm(pert_dir, 0.0))
    lips = []
    for delta in (1e-2, 1e-3):
        u0p = SpectralFunction(grid, data.u0.samples + delta * pert_dir.samples)
        pert, _ = picard_solve(CauchyData.rest(u0p), 2, 1.0, T=0.1, nt=32, tol=1e-10, max_iter=20)
        dev = max(
            sobolev_norm(SpectralFunction(grid, pert.values[k] - base.values[k]), 0.0,
                         upper=base.trust)
            for k in range(base.times.size)
        )
        lips.append(dev / delta)
    assert abs(lips[0] - lips[1]) <= 0.25 * max(lips)


def test_time_reflection_symmetry():
    # with u1 = 0 the scheme's kernels are even in t: solving on [0, T] and
    # on [-T, 0] produces mirrored slice sequences
    grid = grid_make(16.0, 256)
    data = exp_data(grid)
    kappa, p, T, nt = 1.0, 2, 0.1, 16
    fwd, _ = picard_solve(data, p, kappa, T=T, nt=nt, tol=1e-10, max_iter=20)
    times_neg = np.linspace(-T, 0.0, nt + 1)
    cur = linear_field(data, times_neg)
    for _ in range(8):
        cur = duhamel_apply(
            SpaceTimeField(cur.grid, cur.times, cur.values, data.trust), data, p, kappa
        )
    mirrored = cur.values[::-1]
    scale = np.abs(fwd.values).max()
    assert np.abs(fwd.values - mirrored).max() < 1e-12 * scale


def test_field_csv(tmp_path):
    grid = grid_make(8.0, 64)
    data = exp_data(grid)
    field = linear_field(data, np.linspace(0.0, 0.5, 5))
    path = tmp_path / "field.csv"
    write_field_csv(field, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,xi,re,im"
    assert len(lines) == 1 + 5 * 64
