"""Exact sampling of fractional Brownian motion and post-change drift injection.

Two samplers produce the same law: the circulant-embedding (Davies-Harte)
sampler in O(n log n), and a Cholesky sampler in O(n^3) used as an oracle
and as the fallback when the embedding fails numerically.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.linalg import cholesky, toeplitz
from scipy.signal import lfilter

from fraccusum.config import settings
from fraccusum.errors import EmbeddingNotPSD, SizeLimitExceeded, UnsupportedTau
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.enums import DriftFamily
from fraccusum.models.grid import Grid, HurstIndex, SamplePath, Seed, as_hurst

logger = logging.getLogger(__name__)

# Negative circulant eigenvalues above -tol * max eigenvalue are clamped to 0
EMBEDDING_TOLERANCE = 1e-8


def fgn_autocovariance(hurst: HurstIndex | float, lag: int, step: float) -> float:
    """Autocovariance of fBm increments of length `step` at integer `lag`.

    gamma(k) = (step^2H / 2) (|k+1|^2H - 2|k|^2H + |k-1|^2H)
    """
    two_h = 2.0 * as_hurst(hurst).value
    k = abs(lag)
    return 0.5 * step**two_h * (
        abs(k + 1) ** two_h - 2.0 * abs(k) ** two_h + abs(k - 1) ** two_h
    )


def _fgn_autocovariances(h: float, n: int, step: float) -> np.ndarray:
    """gamma(0..n) as an array."""
    two_h = 2.0 * h
    k = np.arange(n + 1, dtype=np.float64)
    return 0.5 * step**two_h * (
        (k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h
    )


@lru_cache(maxsize=32)
def _circulant_sqrt_eigenvalues(h: float, n: int, step: float) -> np.ndarray:
    """sqrt(lambda / 2n) for the 2n-circulant embedding of n fGn increments."""
    gamma = _fgn_autocovariances(h, n, step)
    row = np.concatenate([gamma, gamma[n - 1:0:-1]])
    eigenvalues = np.fft.fft(row).real

    floor = -EMBEDDING_TOLERANCE * eigenvalues.max()
    if eigenvalues.min() < floor:
        raise EmbeddingNotPSD(
            f"circulant embedding has eigenvalue {eigenvalues.min():.3e} "
            f"(H={h}, n={n}); use the exact sampler"
        )
    if eigenvalues.min() < 0.0:
        logger.debug("Clamping %d tiny negative eigenvalues", int(np.sum(eigenvalues < 0.0)))
        eigenvalues = np.clip(eigenvalues, 0.0, None)

    scale = np.sqrt(eigenvalues / (2 * n))
    scale.setflags(write=False)
    return scale


@lru_cache(maxsize=8)
def _cholesky_factor(h: float, n: int, step: float) -> np.ndarray:
    """Lower Cholesky factor of the n x n increment covariance matrix."""
    covariance = toeplitz(_fgn_autocovariances(h, n - 1, step))
    factor = cholesky(covariance, lower=True)
    factor.setflags(write=False)
    return factor


def _path_from_increments(grid: Grid, increments: np.ndarray) -> SamplePath:
    values = np.empty(grid.count + 1)
    values[0] = 0.0
    np.cumsum(increments, out=values[1:])
    return SamplePath(grid=grid, values=values)


def sample_fbm(
    hurst: HurstIndex | float,
    grid: Grid,
    seed: Seed,
    *,
    stream_count: int | None = None,
) -> SamplePath:
    """Sample an fBm path on `grid` by circulant embedding.

    Args:
        hurst: Hurst index H.
        grid: Uniform time grid.
        seed: Replicate seed; the same seed gives a bit-identical path.
        stream_count: Draw this many increments and keep the first grid.count.
            A fixed stream_count makes shorter grids prefixes of longer ones.

    Raises:
        EmbeddingNotPSD: eigenvalues negative beyond tolerance.
    """
    h = as_hurst(hurst).value
    m = max(grid.count, stream_count or 0)
    scale = _circulant_sqrt_eigenvalues(h, m, grid.step)

    normals = seed.generator().standard_normal((2, 2 * m))
    noise = np.fft.fft(scale * (normals[0] + 1j * normals[1])).real
    return _path_from_increments(grid, noise[:grid.count])


def sample_fbm_exact(hurst: HurstIndex | float, grid: Grid, seed: Seed) -> SamplePath:
    """Sample an fBm path by Cholesky factorization of the increment covariance.

    Raises:
        SizeLimitExceeded: grid.count above settings.exact_sampler_limit.
    """
    if grid.count > settings.exact_sampler_limit:
        raise SizeLimitExceeded(
            f"exact sampler supports at most {settings.exact_sampler_limit} steps, "
            f"got {grid.count}"
        )
    h = as_hurst(hurst).value
    factor = _cholesky_factor(h, grid.count, grid.step)
    normals = seed.generator().standard_normal(grid.count)
    return _path_from_increments(grid, factor @ normals)


def apply_volatility(path: SamplePath, sigma: VolatilitySpec) -> SamplePath:
    """Turn an fBm path into xi_t = int_0^t sigma(s) dB^H_s.

    Each increment is scaled by sigma at its cell midpoint.
    """
    if sigma.is_unit:
        return path
    increments = path.increments() * sigma.on_cells(path.grid.count)
    scaled = _path_from_increments(path.grid, increments)
    return scaled.model_copy(update={"change_point": path.change_point, "drift": path.drift})


def _euler_state_drift(path: SamplePath, drift: DriftSpec) -> np.ndarray:
    """Explicit Euler for x_{j+1} = x_j + b(x_j) h + noise increment."""
    step = path.grid.step
    noise = path.increments()

    if drift.family == DriftFamily.AFFINE:
        # Linear recursion x_{j+1} = (1 + c1 h) x_j + c0 h + dB_j
        forcing = drift.c0 * step + noise
        tail = lfilter([1.0], [1.0, -(1.0 + drift.c1 * step)], forcing)
        return np.concatenate(([0.0], tail))

    values = np.empty(path.grid.count + 1)
    values[0] = x = 0.0
    c0, c1, power = drift.c0, drift.c1, drift.power
    for j, dn in enumerate(noise.tolist()):
        x = x + (c0 + c1 * x + min(abs(x), 1.0) ** power) * step + dn
        values[j + 1] = x
    return values


def inject_drift(path: SamplePath, drift: DriftSpec, tau: float) -> SamplePath:
    """Add the post-change drift to a pre-change path.

    tau = inf leaves the values unchanged. tau = 0 adds the closed-form
    integral for polynomial drifts, and integrates b(xi) along the realized
    path by explicit Euler for state-dependent drifts.

    Raises:
        UnsupportedTau: tau is neither 0 nor infinity.
    """
    if tau == math.inf:
        return path.model_copy(update={"change_point": math.inf, "drift": drift})
    if tau != 0.0:
        raise UnsupportedTau(f"change point must be 0 or infinity, got {tau}")

    if drift.is_state_dependent:
        values = _euler_state_drift(path, drift)
    else:
        values = path.values + drift.integral(path.grid.times())
    return SamplePath(grid=path.grid, values=values, change_point=0.0, drift=drift)
