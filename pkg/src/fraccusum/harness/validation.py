"""Built-in property suite run by `fraccusum validate`.

Each check returns a PropertyResult instead of raising, so one failing
property never hides the others.
"""

import logging
import math

import numpy as np
from scipy.stats import ks_2samp, linregress

from fraccusum.engine.cusum import calibrate_threshold, h_fn
from fraccusum.engine.fbm import sample_fbm, sample_fbm_exact
from fraccusum.engine.likelihood import (
    llr_from_path,
    llr_trace,
    poly_coefficients,
    q_process_numeric,
    q_process_poly,
)
from fraccusum.engine.transform import (
    fundamental_transform,
    fundamental_transform_fast,
    quadratic_variation,
)
from fraccusum.models.base import Base
from fraccusum.models.drift import DriftSpec
from fraccusum.models.grid import Grid, SamplePath, Seed
from fraccusum.models.trace import MartingaleTrace

logger = logging.getLogger(__name__)

DEFAULT_HURST_LIST = (0.3, 0.5, 0.75)
CALIBRATION_BUDGETS = (0.01, 0.1, math.e - 2.0, 5.0, 100.0)


class PropertyResult(Base):
    """Outcome of one property check."""
    name: str
    hurst: float | None = None
    passed: bool
    detail: str


def _seed(master_seed: int, index: int) -> Seed:
    return Seed(master_seed=master_seed % 2**64, replicate_index=index)


def _terminal_values(hurst: float, grid: Grid, replicates: int, master_seed: int,
                     exact: bool = False) -> np.ndarray:
    sampler = sample_fbm_exact if exact else sample_fbm
    return np.array([
        sampler(hurst, grid, _seed(master_seed, i)).values[-1] for i in range(replicates)
    ])


def check_variance_ratio(hurst: float, replicates: int, master_seed: int) -> PropertyResult:
    """Var(xi_T) / T^2H within 5/sqrt(N) of 1."""
    grid = Grid(step=0.01, count=512)
    terminal = _terminal_values(hurst, grid, replicates, master_seed)
    ratio = float(np.mean(terminal**2)) / grid.horizon ** (2.0 * hurst)
    bound = 5.0 / math.sqrt(replicates)
    return PropertyResult(
        name="variance_ratio",
        hurst=hurst,
        passed=abs(ratio - 1.0) <= bound,
        detail=f"ratio={ratio:.6f}, bound=1+-{bound:.4f}",
    )


def check_whiteness(master_seed: int, paths: int = 10, count: int = 1000) -> PropertyResult:
    """Pooled lag-1 autocorrelation of H = 1/2 increments below 4/sqrt(n)."""
    grid = Grid(step=1.0, count=count)
    increments = np.array([
        sample_fbm(0.5, grid, _seed(master_seed, i)).increments() for i in range(paths)
    ])
    rho = float(np.sum(increments[:, 1:] * increments[:, :-1]) / np.sum(increments**2))
    bound = 4.0 / math.sqrt(increments.size)
    return PropertyResult(
        name="whiteness",
        hurst=0.5,
        passed=abs(rho) < bound,
        detail=f"rho1={rho:.5f}, bound={bound:.5f}",
    )


def check_sampler_agreement(hurst: float, replicates: int, master_seed: int) -> PropertyResult:
    """Two-sample KS test of the terminal marginal, circulant vs Cholesky, at 1%."""
    grid = Grid(step=1.0 / 256, count=256)
    circulant = _terminal_values(hurst, grid, replicates, master_seed)
    exact = _terminal_values(hurst, grid, replicates, master_seed + 1, exact=True)
    p_value = float(ks_2samp(circulant, exact).pvalue)
    return PropertyResult(
        name="sampler_agreement",
        hurst=hurst,
        passed=p_value >= 0.01,
        detail=f"ks p-value={p_value:.4f}",
    )


def check_transform_identity(master_seed: int, count: int = 4096) -> PropertyResult:
    """At H = 1/2 and unit volatility the transform returns the path itself."""
    path = sample_fbm(0.5, Grid(step=1.0 / count, count=count), _seed(master_seed, 0))
    error = float(np.max(np.abs(fundamental_transform(path, 0.5).zeta - path.values)))
    return PropertyResult(
        name="transform_identity",
        hurst=0.5,
        passed=error <= 1e-12,
        detail=f"max abs error={error:.3e}",
    )


def check_fast_transform(hurst: float, master_seed: int, count: int = 4096) -> PropertyResult:
    """Convolution transform matches the direct sums to 1e-9 relative."""
    path = sample_fbm(hurst, Grid(step=1.0 / count, count=count), _seed(master_seed, 0))
    direct = fundamental_transform(path, hurst).zeta
    fast = fundamental_transform_fast(path, hurst).zeta
    error = float(np.max(np.abs(fast - direct)))
    bound = 1e-9 * float(np.max(np.abs(direct))) + 1e-12
    return PropertyResult(
        name="fast_transform",
        hurst=hurst,
        passed=error <= bound,
        detail=f"max abs error={error:.3e}, bound={bound:.3e}",
    )


def check_q_closed_form(hurst: float, horizon: float = 1.0) -> PropertyResult:
    """Numeric Q matches theta d t^alpha to 1e-3 relative on [0.1 T, T]."""
    grid = Grid(step=1e-3 * horizon, count=1000)
    path = SamplePath(grid=grid, values=np.zeros(grid.count + 1))
    mask = grid.times() >= 0.1 * horizon

    worst = 0.0
    for alpha in (0.0, hurst - 0.5, 0.25):
        closed = q_process_poly(hurst, 1.0, alpha, grid).q
        numeric = q_process_numeric(DriftSpec.polynomial(1.0, alpha), path, hurst).q
        error = float(np.max(np.abs(numeric[mask] - closed[mask]) / np.abs(closed[mask])))
        worst = max(worst, error)
    return PropertyResult(
        name="q_closed_form",
        hurst=hurst,
        passed=worst < 1e-3,
        detail=f"max relative error={worst:.3e}",
    )


def check_linear_energy(hurst: float, theta: float = 1.0) -> PropertyResult:
    """For alpha = H - 1/2, <u> is linear in t with slope theta^2 v."""
    alpha = hurst - 0.5
    grid = Grid(step=1e-3, count=1000)
    qv = quadratic_variation(hurst, grid)
    martingale = MartingaleTrace(grid=grid, zeta=np.zeros(grid.count + 1), qv=qv)
    energy = llr_trace(q_process_poly(hurst, theta, alpha, grid), martingale).qv_u

    fit = linregress(grid.times(), energy)
    expected = theta**2 * poly_coefficients(hurst, alpha).v
    slope_error = abs(fit.slope - expected) / expected
    r_squared = fit.rvalue**2
    return PropertyResult(
        name="linear_energy",
        hurst=hurst,
        passed=r_squared > 0.999 and slope_error < 0.02,
        detail=f"R^2={r_squared:.6f}, slope={fit.slope:.6g}, expected={expected:.6g}",
    )


def check_wald_fixed_horizon(hurst: float, replicates: int, master_seed: int) -> PropertyResult:
    """Under the pre-change law, E[-u_T] = 1/2 E[<u>_T] within 3 standard errors."""
    grid = Grid(step=1.0 / 256, count=256)
    drift = DriftSpec.polynomial(1.0, 0.0)
    gaps = np.empty(replicates)
    for i in range(replicates):
        path = sample_fbm(hurst, grid, _seed(master_seed, i))
        llr = llr_from_path(path, hurst, drift)
        gaps[i] = -llr.u[-1] - 0.5 * llr.qv_u[-1]

    mean = float(np.mean(gaps))
    std_error = float(np.std(gaps, ddof=1) / math.sqrt(replicates))
    return PropertyResult(
        name="wald_fixed_horizon",
        hurst=hurst,
        passed=abs(mean) <= 3.0 * std_error,
        detail=f"mean gap={mean:.4g}, se={std_error:.3g}",
    )


def check_calibration() -> PropertyResult:
    """h(calibrate(gamma)) = gamma to 1e-12 relative, and calibrate(h(c)) = c on (0, 30]."""
    worst_budget = max(
        abs(h_fn(calibrate_threshold(gamma).c) - gamma) / gamma for gamma in CALIBRATION_BUDGETS
    )
    worst_inverse = max(
        abs(calibrate_threshold(h_fn(c)).c - c) for c in np.linspace(0.05, 30.0, 200)
    )
    return PropertyResult(
        name="calibration_round_trip",
        passed=worst_budget <= 1e-12 and worst_inverse <= 1e-10,
        detail=f"max rel residual={worst_budget:.2e}, max abs inverse error={worst_inverse:.2e}",
    )


def run_validation_suite(
    hurst_list=DEFAULT_HURST_LIST,
    replicates: int = 10_000,
    master_seed: int = 0,
) -> list[PropertyResult]:
    """Run every property; Monte Carlo checks use `replicates` paths per H."""
    results = [check_whiteness(master_seed), check_transform_identity(master_seed)]
    for hurst in hurst_list:
        logger.info("Validating H=%s with %d replicates", hurst, replicates)
        results.extend([
            check_variance_ratio(hurst, replicates, master_seed),
            check_sampler_agreement(hurst, replicates, master_seed),
            check_fast_transform(hurst, master_seed),
            check_q_closed_form(hurst),
            check_linear_energy(hurst),
            check_wald_fixed_horizon(hurst, replicates, master_seed),
        ])
    results.append(check_calibration())

    for result in results:
        if not result.passed:
            logger.warning("Property %s failed (H=%s): %s",
                           result.name, result.hurst, result.detail)
    return results
