"""Kernel k_H, its constants, and the fundamental-martingale transform.

zeta_t = int_0^t k_H(t, s) sigma(s)^-1 dxi_s,  k_H(t, s) = c_H^-1 s^(1/2-H) (t-s)^(1/2-H)

is a martingale under the pre-change law with deterministic quadratic
variation <zeta>_t = lambda_H^-1 t^(2-2H). The kernel is evaluated at cell
midpoints, which never touch its endpoint singularities.
"""

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma

from fraccusum.errors import DomainError
from fraccusum.models.drift import VolatilitySpec
from fraccusum.models.grid import Grid, HurstIndex, SamplePath, as_hurst
from fraccusum.models.trace import FracConstants, MartingaleTrace


def frac_constants(hurst: HurstIndex | float) -> FracConstants:
    """c_H = 2H G(3/2-H) G(H+1/2) and lambda_H = 2H G(3-2H) G(H+1/2) / G(3/2-H)."""
    h = as_hurst(hurst).value
    c_h = 2.0 * h * gamma(1.5 - h) * gamma(h + 0.5)
    lambda_h = 2.0 * h * gamma(3.0 - 2.0 * h) * gamma(h + 0.5) / gamma(1.5 - h)
    return FracConstants(c_h=float(c_h), lambda_h=float(lambda_h))


def kernel_k(hurst: HurstIndex | float, t: float, s: float) -> float:
    """k_H(t, s) for 0 < s < t.

    Raises:
        DomainError: s outside (0, t).
    """
    if not 0.0 < s < t:
        raise DomainError(f"kernel needs 0 < s < t, got s={s}, t={t}")
    hurst = as_hurst(hurst)
    a = hurst.kernel_exponent
    return s**a * (t - s) ** a / frac_constants(hurst).c_h


def quadratic_variation(hurst: HurstIndex | float, grid: Grid) -> np.ndarray:
    """<zeta> at the grid times, from the closed form lambda_H^-1 t^(2-2H)."""
    hurst = as_hurst(hurst)
    exponent = 2.0 - 2.0 * hurst.value
    return grid.times() ** exponent / frac_constants(hurst).lambda_h


def _scaled_increments(path: SamplePath, sigma: VolatilitySpec) -> np.ndarray:
    increments = path.increments()
    if sigma.is_unit:
        return increments
    return increments / sigma.on_cells(path.grid.count)


def fundamental_transform(
    path: SamplePath,
    hurst: HurstIndex | float,
    sigma: VolatilitySpec | None = None,
) -> MartingaleTrace:
    """Direct O(n^2) midpoint evaluation of zeta at every grid time."""
    hurst = as_hurst(hurst)
    sigma = sigma or VolatilitySpec()
    grid = path.grid
    a = hurst.kernel_exponent
    c_h = frac_constants(hurst).c_h

    times = grid.times()
    mid = grid.midpoints()
    increments = _scaled_increments(path, sigma)
    left = mid**a

    zeta = np.zeros(grid.count + 1)
    for n in range(1, grid.count + 1):
        weights = left[:n] * (times[n] - mid[:n]) ** a
        zeta[n] = weights @ increments[:n] / c_h

    return MartingaleTrace(grid=grid, zeta=zeta, qv=quadratic_variation(hurst, grid))


def fundamental_transform_fast(
    path: SamplePath,
    hurst: HurstIndex | float,
    sigma: VolatilitySpec | None = None,
) -> MartingaleTrace:
    """Same midpoint sums as fundamental_transform, in O(n log n).

    t_n - s_j* = (n - j - 1/2) step, so the sum over j is the (n-1)-th term
    of the convolution of [s_j*^(1/2-H) dxi_j / sigma_j] with [s_k*^(1/2-H)].
    """
    hurst = as_hurst(hurst)
    sigma = sigma or VolatilitySpec()
    grid = path.grid
    a = hurst.kernel_exponent
    c_h = frac_constants(hurst).c_h

    powers = grid.midpoints() ** a
    weighted = powers * _scaled_increments(path, sigma)

    zeta = np.zeros(grid.count + 1)
    zeta[1:] = fftconvolve(powers, weighted)[:grid.count] / c_h

    return MartingaleTrace(grid=grid, zeta=zeta, qv=quadratic_variation(hurst, grid))
