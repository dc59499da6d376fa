"""Tests for fBm sampling, volatility scaling and drift injection."""

import math

import numpy as np
import pytest
from scipy import stats

from fraccusum.config import settings
from fraccusum.engine import fbm
from fraccusum.engine.fbm import (
    apply_volatility,
    fgn_autocovariance,
    inject_drift,
    sample_fbm,
    sample_fbm_exact,
)
from fraccusum.errors import EmbeddingNotPSD, SizeLimitExceeded, UnsupportedTau
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.grid import Grid, SamplePath, Seed


# ---- helpers ----


def _terminal_values(hurst, grid, n, sampler=sample_fbm, master_seed=11):
    return np.array([
        sampler(hurst, grid, Seed(master_seed=master_seed, replicate_index=i)).values[-1]
        for i in range(n)
    ])


# ---- autocovariance ----


def test_autocovariance_brownian_unit_variance():
    assert fgn_autocovariance(0.5, 0, 1.0) == pytest.approx(1.0)


def test_autocovariance_brownian_independent_increments():
    assert fgn_autocovariance(0.5, 3, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_autocovariance_fractional_lag_one():
    assert fgn_autocovariance(0.75, 1, 1.0) == pytest.approx((2**1.5 - 2.0) / 2.0)


def test_autocovariance_scales_with_step():
    assert fgn_autocovariance(0.3, 2, 0.01) == pytest.approx(
        0.01**0.6 * fgn_autocovariance(0.3, 2, 1.0)
    )


def test_autocovariance_vector_matches_scalar():
    gamma = fbm._fgn_autocovariances(0.65, 5, 0.1)
    expected = [fgn_autocovariance(0.65, k, 0.1) for k in range(6)]
    np.testing.assert_allclose(gamma, expected, rtol=1e-14)


# ---- circulant sampler ----


def test_sample_fbm_is_deterministic(grid):
    seed = Seed(master_seed=7, replicate_index=0)
    first = sample_fbm(0.7, grid, seed)
    second = sample_fbm(0.7, grid, seed)

    assert first.values[0] == 0.0
    assert first.values.size == grid.count + 1
    assert np.array_equal(first.values, second.values)


def test_sample_fbm_replicates_differ(grid):
    a = sample_fbm(0.7, grid, Seed(master_seed=7, replicate_index=0))
    b = sample_fbm(0.7, grid, Seed(master_seed=7, replicate_index=1))
    assert not np.array_equal(a.values, b.values)


def test_sample_fbm_prefix_stable_with_stream_count():
    seed = Seed(master_seed=3, replicate_index=5)
    short = sample_fbm(0.3, Grid(step=0.01, count=100), seed, stream_count=400)
    long = sample_fbm(0.3, Grid(step=0.01, count=300), seed, stream_count=400)

    assert np.array_equal(short.values, long.values[:101])


@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.75])
def test_sample_fbm_self_similar_variance(hurst):
    n = 2000
    terminal = _terminal_values(hurst, Grid(step=1.0 / 64, count=64), n)

    ratio = np.mean(terminal**2)  # T = 1
    assert abs(ratio - 1.0) <= 5.0 / math.sqrt(n)


def test_sample_fbm_reports_non_psd_embedding(monkeypatch, clear_sampler_caches):
    def broken(h, n, step):
        gamma = np.zeros(n + 1)
        gamma[0], gamma[1] = 1.0, 2.0
        return gamma

    monkeypatch.setattr(fbm, "_fgn_autocovariances", broken)
    with pytest.raises(EmbeddingNotPSD):
        sample_fbm(0.6, Grid(step=0.125, count=16), Seed(master_seed=0))


# ---- exact sampler ----


def test_exact_sampler_brownian_is_scaled_normals():
    grid = Grid(step=0.25, count=64)
    seed = Seed(master_seed=5, replicate_index=2)

    path = sample_fbm_exact(0.5, grid, seed)
    normals = seed.generator().standard_normal(grid.count)
    np.testing.assert_allclose(path.increments(), 0.5 * normals, rtol=1e-12, atol=1e-14)


def test_exact_sampler_size_limit(monkeypatch):
    monkeypatch.setattr(settings, "exact_sampler_limit", 8)
    with pytest.raises(SizeLimitExceeded):
        sample_fbm_exact(0.5, Grid(step=0.1, count=16), Seed(master_seed=0))


def test_exact_sampler_lag_one_autocovariance():
    n = 500
    grid = Grid(step=1.0, count=128)
    lag_one = np.mean([
        np.mean(path.increments()[1:] * path.increments()[:-1])
        for path in (
            sample_fbm_exact(0.65, grid, Seed(master_seed=9, replicate_index=i))
            for i in range(n)
        )
    ])
    assert abs(lag_one - fgn_autocovariance(0.65, 1, 1.0)) < 4.0 / math.sqrt(n)


def test_samplers_agree_on_terminal_variance():
    n = 2000
    grid = Grid(step=1.0 / 128, count=128)
    circulant = _terminal_values(0.75, grid, n)
    exact = _terminal_values(0.75, grid, n, sampler=sample_fbm_exact, master_seed=12)

    assert abs(np.var(circulant) - np.var(exact)) < 6.0 * math.sqrt(2.0 / n)


def test_samplers_agree_in_distribution():
    n = 2000
    grid = Grid(step=1.0 / 128, count=128)
    circulant = _terminal_values(0.7, grid, n)
    exact = _terminal_values(0.7, grid, n, sampler=sample_fbm_exact, master_seed=12)

    assert stats.ks_2samp(circulant, exact).pvalue > 1e-3
    # B_H(1) ~ N(0, 1)
    assert stats.kstest(circulant, "norm").pvalue > 1e-3


# ---- volatility ----


def test_apply_volatility_constant_scales_path(grid):
    path = sample_fbm(0.6, grid, Seed(master_seed=1))
    scaled = apply_volatility(path, VolatilitySpec.constant(2.0))

    np.testing.assert_allclose(scaled.values, 2.0 * path.values)


def test_apply_volatility_unit_is_identity(grid):
    path = sample_fbm(0.6, grid, Seed(master_seed=1))
    assert apply_volatility(path, VolatilitySpec()) is path


def test_apply_volatility_tabulated_uses_cell_midpoints():
    grid = Grid(step=1.0, count=2)
    path = SamplePath(grid=grid, values=[0.0, 1.0, 2.0])
    scaled = apply_volatility(path, VolatilitySpec.tabulated([1.0, 3.0, 5.0]))

    np.testing.assert_allclose(scaled.values, [0.0, 2.0, 6.0])


# ---- drift injection ----


def test_inject_constant_drift_integrates_to_time():
    grid = Grid(step=0.1, count=10)
    path = SamplePath(grid=grid, values=np.zeros(11))

    drifted = inject_drift(path, DriftSpec.polynomial(theta=1.0, alpha=0.0), 0.0)

    assert drifted.values[10] == pytest.approx(1.0)
    assert drifted.change_point == 0.0


def test_inject_polynomial_drift_closed_form():
    grid = Grid(step=0.1, count=10)
    path = SamplePath(grid=grid, values=np.zeros(11))

    drifted = inject_drift(path, DriftSpec.polynomial(theta=2.0, alpha=0.5), 0.0)

    np.testing.assert_allclose(drifted.values, 2.0 * grid.times() ** 1.5 / 1.5)


def test_inject_zero_drift_is_identity(grid):
    path = sample_fbm(0.4, grid, Seed(master_seed=2))
    drifted = inject_drift(path, DriftSpec.polynomial(theta=0.0), 0.0)
    np.testing.assert_array_equal(drifted.values, path.values)


def test_inject_at_infinity_keeps_values(grid):
    path = sample_fbm(0.4, grid, Seed(master_seed=2))
    drift = DriftSpec.polynomial(theta=1.0)

    unchanged = inject_drift(path, drift, math.inf)

    np.testing.assert_array_equal(unchanged.values, path.values)
    assert unchanged.change_point == math.inf
    assert unchanged.drift == drift


def test_inject_rejects_intermediate_change_point(grid, zero_path):
    with pytest.raises(UnsupportedTau):
        inject_drift(zero_path, DriftSpec.polynomial(), 0.5)


def test_inject_affine_drift_without_noise():
    grid = Grid(step=0.1, count=10)
    path = SamplePath(grid=grid, values=np.zeros(11))

    drifted = inject_drift(path, DriftSpec.affine(c0=1.0, c1=0.0), 0.0)

    np.testing.assert_allclose(drifted.values, grid.times(), atol=1e-12)


def test_inject_affine_drift_matches_euler_loop(grid):
    path = sample_fbm(0.7, grid, Seed(master_seed=4))
    drift = DriftSpec.affine(c0=0.5, c1=-0.8)

    drifted = inject_drift(path, drift, 0.0)

    expected = [0.0]
    for dn in path.increments():
        x = expected[-1]
        expected.append(x + (0.5 - 0.8 * x) * grid.step + dn)
    np.testing.assert_allclose(drifted.values, expected, rtol=1e-10, atol=1e-12)


def test_inject_bounded_power_drift_without_noise():
    grid = Grid(step=0.5, count=2)
    path = SamplePath(grid=grid, values=np.zeros(3))

    drifted = inject_drift(path, DriftSpec.bounded_power(c0=1.0, c1=0.0, power=0.5), 0.0)

    # x1 = 0 + (1 + 0) / 2, x2 = x1 + (1 + sqrt(0.5)) / 2
    np.testing.assert_allclose(drifted.values, [0.0, 0.5, 0.5 + (1.0 + math.sqrt(0.5)) / 2])
