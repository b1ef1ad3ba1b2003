import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snls.grid import GridSpec
from snls.noise_model import (
    CovarianceSpec,
    NoiseSampler,
    gaussian_spectrum_amplitudes,
    make_rng,
    noise_constants,
    sample_increment_complex,
    sample_increment_real,
)


@pytest.fixture()
def grid():
    return GridSpec(1, 2 * np.pi, 64)


def test_single_zero_mode_constants(grid):
    a = 0.7
    nc = noise_constants(CovarianceSpec("fourier_diagonal", {(0,): a}), grid, 2.0)
    # one-term basis: phi e_0 = a / sqrt(L)
    assert nc.hs00 == pytest.approx(a**2, rel=1e-13)
    assert nc.M_phi == pytest.approx(0.0, abs=1e-15)
    assert nc.hs01 == pytest.approx(a**2, rel=1e-13)
    assert nc.C_phi_1 == 0.0
    assert np.allclose(nc.F_phi, a**2 / (2 * np.pi), rtol=1e-13)


def test_zero_covariance_all_constants_vanish(grid):
    nc = noise_constants(CovarianceSpec("fourier_diagonal", {}), grid, 2.0)
    for v in (nc.hs00, nc.hs01, nc.M_phi, nc.C_rad_2s2, nc.C_phi_Sigma,
              nc.C_phi_1, nc.C_phi_2, nc.C_phi_interp):
        assert v == 0.0
    assert np.all(nc.F_phi == 0.0)


def test_pm1_modes_f1_constant(grid):
    # lambda = a on modes +-1, L = 2 pi: f1_phi = 2 a^2 / L, spatially constant
    a = 0.5
    nc = noise_constants(CovarianceSpec("fourier_diagonal", {(1,): a, (-1,): a}),
                         grid, 2.0)
    expect = 2 * a**2 / (2 * np.pi)
    assert np.allclose(nc.f1_phi, expect, rtol=1e-12)
    assert nc.M_phi == pytest.approx(expect, rel=1e-12)
    assert nc.hs00 == pytest.approx(2 * a**2, rel=1e-13)
    assert nc.hs01 == pytest.approx(2 * a**2 * (1 + 1.0), rel=1e-13)  # xi_1 = 1


def test_conflicting_pair_amplitudes_rejected():
    with pytest.raises(ValueError, match="conflicting"):
        CovarianceSpec("fourier_diagonal", {(1,): 0.5, (-1,): 0.6})
    with pytest.raises(ValueError, match="nonnegative"):
        CovarianceSpec("fourier_diagonal", {(1,): -0.5})


def test_band_validation(grid):
    # mode 30 exceeds the 2/3 band of N = 64 (cut at |k| <= 21)
    spec = CovarianceSpec("fourier_diagonal", {(30,): 0.1})
    with pytest.raises(ValueError, match="exceeds spectral band"):
        noise_constants(spec, grid, 2.0)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(0.1, 10.0))
def test_quadratic_scaling_law(c):
    grid = GridSpec(1, 2 * np.pi, 64)
    base = CovarianceSpec("fourier_diagonal", {(0,): 0.3, (1,): 0.2, (2,): 0.1})
    nc0 = noise_constants(base, grid, 2.0)
    nc1 = noise_constants(base.with_scale(c), grid, 2.0)
    for a, b in [(nc0.hs00, nc1.hs00), (nc0.hs01, nc1.hs01), (nc0.M_phi, nc1.M_phi),
                 (nc0.C_phi_1, nc1.C_phi_1), (nc0.C_phi_Sigma, nc1.C_phi_Sigma),
                 (nc0.C_rad_2s2, nc1.C_rad_2s2)]:
        assert b == pytest.approx(c**2 * a, rel=1e-12)


def test_cauchy_schwarz_chain(grid):
    rng = np.random.default_rng(7)
    for _ in range(10):
        amps = {(int(k),): float(rng.uniform(0, 1)) for k in rng.integers(0, 8, size=4)}
        nc = noise_constants(CovarianceSpec("fourier_diagonal", amps), grid, 2.0)
        assert nc.C_phi_2 <= math.sqrt(nc.C_phi_1 * nc.C_phi_Sigma) + 1e-12
        assert nc.C_phi_1 <= nc.hs01 + 1e-12


def test_reproducible_increments(grid):
    spec = CovarianceSpec("fourier_diagonal", {(1,): 0.5, (2,): 0.25})
    a = sample_increment_real(spec, grid, 0.1, make_rng(7, 3))
    b = sample_increment_real(spec, grid, 0.1, make_rng(7, 3))
    assert np.array_equal(a, b)
    c = sample_increment_real(spec, grid, 0.1, make_rng(7, 4))
    assert not np.array_equal(a, c)


def test_zero_covariance_increment(grid):
    spec = CovarianceSpec("fourier_diagonal", {})
    dw = sample_increment_real(spec, grid, 0.1, make_rng(0, 0))
    assert np.all(dw == 0.0)
    dwc = sample_increment_complex(spec, grid, 0.1, make_rng(0, 0))
    assert np.all(dwc == 0.0)


def test_real_increment_pointwise_variance(grid):
    # Var(dW(x)) / dt = F_phi(x) within 3 standard errors (Monte Carlo oracle)
    spec = CovarianceSpec("fourier_diagonal", {(0,): 0.2, (1,): 0.15, (3,): 0.1})
    nc = noise_constants(spec, grid, 2.0)
    sampler = NoiseSampler(spec, grid)
    rng = make_rng(123, 0)
    n, dt = 100_000, 0.05
    acc = np.zeros(grid.shape)
    acc2 = np.zeros(grid.shape)
    for _ in range(n):
        dw = sampler.sample_real(dt, rng)
        acc += dw
        acc2 += dw**2
    assert np.max(np.abs(acc / n)) < 4 * math.sqrt(np.max(nc.F_phi) * dt / n)
    var = acc2 / n - (acc / n) ** 2
    se = nc.F_phi * dt * math.sqrt(2.0 / n)
    assert np.all(np.abs(var - nc.F_phi * dt) <= 3 * se + 1e-12)


def test_disjoint_mode_projections_uncorrelated(grid):
    # increments project independently onto disjoint-support spectral amplitudes
    spec = CovarianceSpec("fourier_diagonal", {(1,): 0.3, (4,): 0.3})
    sampler = NoiseSampler(spec, grid)
    rng = make_rng(55, 0)
    x = grid.axes[0]
    e1 = np.cos(x) * math.sqrt(2 / (2 * np.pi))
    e4 = np.cos(4 * x) * math.sqrt(2 / (2 * np.pi))
    h = grid.cell_volume
    n, dt = 30_000, 0.1
    p1 = np.empty(n)
    p4 = np.empty(n)
    for i in range(n):
        dw = sampler.sample_real(dt, rng)
        p1[i] = h * np.sum(dw * e1)
        p4[i] = h * np.sum(dw * e4)
    corr = np.corrcoef(p1, p4)[0, 1]
    assert abs(corr) < 3.0 / math.sqrt(n)


def test_complex_increment_normalization(grid):
    # E ||dW||_L2^2 = hs00 dt, and Re/Im parts uncorrelated
    spec = CovarianceSpec("fourier_diagonal", {(0,): 0.2, (2,): 0.1})
    nc = noise_constants(spec, grid, 2.0)
    sampler = NoiseSampler(spec, grid)
    rng = make_rng(321, 0)
    n, dt = 100_000, 0.05
    norms = np.empty(n)
    re0 = np.empty(n)
    im0 = np.empty(n)
    for i in range(n):
        dw = sampler.sample_complex(dt, rng)
        norms[i] = grid.cell_volume * np.sum(np.abs(dw) ** 2)
        re0[i] = dw.real[0]
        im0[i] = dw.imag[0]
    z = (norms.mean() - nc.hs00 * dt) / (norms.std(ddof=1) / math.sqrt(n))
    assert abs(z) <= 3.0
    corr = np.corrcoef(re0, im0)[0, 1]
    assert abs(corr) < 3.0 / math.sqrt(n)


def test_gaussian_spectrum_profile():
    grid = GridSpec(1, 2 * np.pi, 64)
    amps = gaussian_spectrum_amplitudes(grid, strength=0.5, width=1.0, k_max=3)
    assert amps[(0,)] == pytest.approx(0.5)
    assert amps[(3,)] == pytest.approx(0.5 * math.exp(-4.5), rel=1e-12)
    assert (2,) in amps and (-2,) not in amps  # canonical pair representatives


def test_physical_kernel_reduces_to_diagonal():
    grid = GridSpec(1, 2 * np.pi, 64)
    width = 0.5
    x = grid.axes[0]
    kern = np.exp(-(x**2) / (2 * width**2))
    spec = CovarianceSpec("physical_kernel", kernel=kern)
    nc = noise_constants(spec, grid, 2.0)
    # multiplier oracle: lambda(xi) = int K(z) cos(xi z) dz (K even, real)
    h = grid.cell_volume
    lam0 = h * np.sum(kern)
    lam1 = h * np.sum(kern * np.cos(x))
    amps = spec.mode_amplitudes(grid)
    assert amps[(0,)] == pytest.approx(lam0, rel=1e-12)
    assert amps[(1,)] == pytest.approx(lam1, rel=1e-12)
    expect_hs00 = sum(v**2 * (1 if k == (0,) else 2) for k, v in amps.items())
    assert nc.hs00 == pytest.approx(expect_hs00, rel=1e-12)


def test_multiplicative_increment_is_real(grid):
    spec = CovarianceSpec("fourier_diagonal", {(1,): 0.5})
    dw = sample_increment_real(spec, grid, 0.1, make_rng(1, 1))
    assert np.isrealobj(dw)


def test_2d_constants_and_sampling():
    grid = GridSpec(2, 10.0, 16)
    spec = CovarianceSpec("fourier_diagonal", {(0, 0): 0.2, (1, 0): 0.1, (1, 1): 0.1})
    nc = noise_constants(spec, grid, 1.0)
    assert nc.hs00 == pytest.approx(0.2**2 + 2 * 0.1**2 + 2 * 0.1**2, rel=1e-12)
    dw = sample_increment_real(spec, grid, 0.1, make_rng(0, 0))
    assert dw.shape == grid.shape
