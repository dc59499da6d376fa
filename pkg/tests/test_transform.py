"""Tests for the kernel constants and the fundamental-martingale transform."""

import math

import numpy as np
import pytest

from fraccusum.engine.fbm import sample_fbm
from fraccusum.engine.transform import (
    frac_constants,
    fundamental_transform,
    fundamental_transform_fast,
    kernel_k,
    quadratic_variation,
)
from fraccusum.errors import DomainError
from fraccusum.models.drift import VolatilitySpec
from fraccusum.models.grid import Grid, Seed


# ---- constants and kernel ----


def test_constants_brownian_case():
    constants = frac_constants(0.5)
    assert constants.c_h == pytest.approx(1.0)
    assert constants.lambda_h == pytest.approx(1.0)


def test_constants_fractional_case():
    constants = frac_constants(0.75)

    assert constants.c_h == pytest.approx(1.5 * math.gamma(0.75) * math.gamma(1.25))
    assert constants.lambda_h == pytest.approx(
        1.5 * math.gamma(1.5) * math.gamma(1.25) / math.gamma(0.75)
    )


def test_kernel_values():
    assert kernel_k(0.5, 1.0, 0.5) == pytest.approx(1.0)
    assert kernel_k(0.75, 1.0, 0.5) == pytest.approx(
        math.sqrt(2.0) / frac_constants(0.75).c_h
    )


@pytest.mark.parametrize("s, t", [(0.0, 1.0), (1.0, 1.0), (1.5, 1.0), (-0.1, 1.0)])
def test_kernel_outside_open_interval(s, t):
    with pytest.raises(DomainError):
        kernel_k(0.3, t, s)


def test_kernel_rejects_bad_hurst():
    with pytest.raises(DomainError):
        kernel_k(1.0, 1.0, 0.5)


def test_quadratic_variation_closed_form(grid):
    qv = quadratic_variation(0.7, grid)

    assert qv[0] == 0.0
    np.testing.assert_allclose(qv, grid.times() ** 0.6 / frac_constants(0.7).lambda_h)


def test_quadratic_variation_brownian_is_time(grid):
    np.testing.assert_allclose(quadratic_variation(0.5, grid), grid.times(), rtol=1e-14)


# ---- transform ----


def test_transform_brownian_identity(grid):
    path = sample_fbm(0.5, grid, Seed(master_seed=21))

    trace = fundamental_transform(path, 0.5)

    np.testing.assert_allclose(trace.zeta, path.values, rtol=0.0, atol=1e-12)


def test_transform_of_zero_path(zero_path):
    trace = fundamental_transform(zero_path, 0.3)

    assert np.all(trace.zeta == 0.0)
    assert trace.qv[-1] == pytest.approx(1.0 / frac_constants(0.3).lambda_h)


@pytest.mark.parametrize("hurst", [0.3, 0.75])
def test_fast_transform_matches_direct(hurst):
    grid = Grid(step=1.0 / 512, count=512)
    path = sample_fbm(hurst, grid, Seed(master_seed=8))

    direct = fundamental_transform(path, hurst).zeta
    fast = fundamental_transform_fast(path, hurst).zeta

    bound = 1e-9 * np.max(np.abs(direct)) + 1e-12
    assert np.max(np.abs(fast - direct)) <= bound


def test_constant_volatility_rescales_martingale(grid):
    path = sample_fbm(0.65, grid, Seed(master_seed=3))

    unit = fundamental_transform(path, 0.65).zeta
    doubled = fundamental_transform(path, 0.65, VolatilitySpec.constant(2.0)).zeta

    np.testing.assert_allclose(doubled, 0.5 * unit, rtol=1e-13, atol=1e-15)


def test_tabulated_volatility_fast_matches_direct():
    grid = Grid(step=1.0 / 128, count=128)
    path = sample_fbm(0.4, grid, Seed(master_seed=4))
    sigma = VolatilitySpec.tabulated(1.0 + 0.5 * np.sin(grid.times()))

    direct = fundamental_transform(path, 0.4, sigma).zeta
    fast = fundamental_transform_fast(path, 0.4, sigma).zeta

    np.testing.assert_allclose(fast, direct, rtol=1e-9, atol=1e-12)


def test_martingale_terminal_variance():
    n = 1000
    grid = Grid(step=1.0 / 128, count=128)
    terminal = np.array([
        fundamental_transform_fast(
            sample_fbm(0.6, grid, Seed(master_seed=30, replicate_index=i)), 0.6
        ).zeta[-1]
        for i in range(n)
    ])

    expected = 1.0 / frac_constants(0.6).lambda_h
    assert abs(np.mean(terminal**2) / expected - 1.0) < 0.2


def test_martingale_increments_uncorrelated():
    n = 1000
    grid = Grid(step=1.0 / 64, count=64)
    increments = np.array([
        np.diff(fundamental_transform_fast(
            sample_fbm(0.7, grid, Seed(master_seed=31, replicate_index=i)), 0.7
        ).zeta)
        for i in range(n)
    ])

    for j in (10, 30, 60):
        product = increments[:, j] * increments[:, j + 1]
        z = np.mean(product) / (np.std(product, ddof=1) / math.sqrt(n))
        assert abs(z) < 4.0
