"""The Q process and the log-likelihood ratio of post- vs pre-change law.

Q_t = d/d<zeta>_t int_0^t k_H(t, s) mu_s / sigma(s) ds
u_t = int_0^t Q_s dzeta_s - 1/2 int_0^t Q_s^2 d<zeta>_s
"""

import math

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma

from fraccusum.engine.transform import (
    frac_constants,
    fundamental_transform,
    fundamental_transform_fast,
    quadratic_variation,
)
from fraccusum.errors import DomainError, GridMismatch
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.enums import VolatilityFamily
from fraccusum.models.grid import Grid, HurstIndex, SamplePath, as_hurst
from fraccusum.models.trace import LLRTrace, MartingaleTrace, PolyCoefficients, QTrace


def poly_coefficients(hurst: HurstIndex | float, alpha: float) -> PolyCoefficients:
    """d_{H,alpha} and v_{H,alpha} for mu_t = t^alpha.

    d = G(3-2H) G(3/2-H+alpha) / (G(3-2H+alpha) G(3/2-H)) * (2-2H+alpha) / (2-2H)
    v = d^2 / lambda_H * (1-H) / (1-H+alpha)

    Raises:
        DomainError: a Gamma argument is nonpositive, or alpha = H - 1.
    """
    hurst = as_hurst(hurst)
    h = hurst.value
    shifted = 1.5 - h + alpha
    upper = 3.0 - 2.0 * h + alpha
    if shifted <= 0.0 or upper <= 0.0:
        raise DomainError(
            f"alpha={alpha} gives a nonpositive Gamma argument for H={h} "
            f"(3/2-H+alpha={shifted}, 3-2H+alpha={upper})"
        )
    if 1.0 - h + alpha == 0.0:
        raise DomainError(f"v is undefined at alpha = H - 1 = {alpha}")

    ratio = gamma(3.0 - 2.0 * h) * gamma(shifted) / (gamma(upper) * gamma(1.5 - h))
    d = float(ratio * (2.0 - 2.0 * h + alpha) / (2.0 - 2.0 * h))
    v = d**2 / frac_constants(hurst).lambda_h * (1.0 - h) / (1.0 - h + alpha)
    return PolyCoefficients(d=d, v=v)


def q_process_poly(
    hurst: HurstIndex | float,
    theta: float,
    alpha: float,
    grid: Grid,
) -> QTrace:
    """Closed-form Q_t = theta * d_{H,alpha} * t^alpha on the grid.

    At t = 0 the trace holds 0 for alpha > 0, theta * d for alpha = 0, and 0
    with singular_origin set for alpha < 0.
    """
    coefficients = poly_coefficients(hurst, alpha)
    times = grid.times()
    q = np.empty(grid.count + 1)
    q[1:] = theta * coefficients.d * times[1:] ** alpha
    q[0] = theta * coefficients.d if alpha == 0.0 else 0.0
    return QTrace(grid=grid, q=q, singular_origin=alpha < 0.0 and theta != 0.0)


def _kernel_cell_integrals(a: float, grid: Grid) -> np.ndarray:
    """G_k = int_{k h}^{(k+1) h} u^a du for k = 0..count-1."""
    k = np.arange(grid.count + 1, dtype=np.float64)
    edges = (k * grid.step) ** (a + 1.0)
    return np.diff(edges) / (a + 1.0)


def _drift_cell_moments(
    drift: DriftSpec,
    path: SamplePath,
    a: float,
    sigma: VolatilitySpec,
) -> np.ndarray:
    """F_j = h^-1 int_{cell j} s^a mu_s / sigma(s) ds.

    Exact for polynomial drifts; state drifts freeze b at the cell's left
    point xi_{t_j}, the value the Euler injection uses on that cell.
    """
    grid = path.grid
    edges = grid.times()
    if drift.is_state_dependent:
        cell_power = np.diff(edges ** (a + 1.0)) / (a + 1.0)
        moments = drift.b(path.values[:-1]) * cell_power
    else:
        exponent = a + drift.alpha + 1.0
        if exponent <= 0.0:
            raise DomainError(f"s^(1/2-H) mu_s is not integrable at 0 (exponent {exponent - 1})")
        moments = drift.theta * np.diff(edges**exponent) / exponent
    moments = moments / grid.step
    if not sigma.is_unit:
        moments = moments / sigma.on_cells(grid.count)
    return moments


def _backward_derivative(psi: np.ndarray, clock: np.ndarray) -> np.ndarray:
    """d psi / d clock at each node from backward differences.

    Second order (three nodes, non-uniform spacing) from index 2 on, first
    order at index 1; index 0 copies index 1.
    """
    q = np.empty_like(psi)
    q[1] = (psi[1] - psi[0]) / (clock[1] - clock[0])
    x0, x1, x2 = clock[:-2], clock[1:-1], clock[2:]
    y0, y1, y2 = psi[:-2], psi[1:-1], psi[2:]
    q[2:] = (
        y0 * (x2 - x1) / ((x0 - x1) * (x0 - x2))
        + y1 * (x2 - x0) / ((x1 - x0) * (x1 - x2))
        + y2 * (2.0 * x2 - x0 - x1) / ((x2 - x0) * (x2 - x1))
    )
    q[0] = q[1]
    return q


def q_process_numeric(
    drift: DriftSpec,
    path: SamplePath,
    hurst: HurstIndex | float,
    sigma: VolatilitySpec | None = None,
) -> QTrace:
    """Q from its definition, by quadrature and differentiation in the <zeta> clock.

    psi(t_n) = int_0^t_n k_H(t_n, s) mu_s / sigma(s) ds is computed with the
    kernel factor (t_n - s)^(1/2-H) integrated exactly over each cell and the
    factor s^(1/2-H) mu_s / sigma(s) averaged over the cell; both endpoint
    singularities are then integrated exactly. The sum over cells is a
    convolution and runs in O(n log n).
    """
    hurst = as_hurst(hurst)
    sigma = sigma or VolatilitySpec()
    grid = path.grid
    a = hurst.kernel_exponent

    moments = _drift_cell_moments(drift, path, a, sigma)
    kernel_cells = _kernel_cell_integrals(a, grid)

    psi = np.zeros(grid.count + 1)
    psi[1:] = fftconvolve(moments, kernel_cells)[:grid.count] / frac_constants(hurst).c_h

    q = _backward_derivative(psi, quadratic_variation(hurst, grid))
    return QTrace(grid=grid, q=q)


def llr_trace(q: QTrace, m: MartingaleTrace) -> LLRTrace:
    """Left-point discretization of u and <u> = int Q^2 d<zeta>.

    Raises:
        GridMismatch: q and m live on different grids.
    """
    if q.grid != m.grid:
        raise GridMismatch(f"Q grid {q.grid} differs from martingale grid {m.grid}")

    left = q.q[:-1]
    energy = np.zeros(q.grid.count + 1)
    np.cumsum(left**2 * np.diff(m.qv), out=energy[1:])

    drive = np.zeros(q.grid.count + 1)
    np.cumsum(left * np.diff(m.zeta), out=drive[1:])

    return LLRTrace(grid=q.grid, u=drive - 0.5 * energy, qv_u=energy)


def energy_growth(hurst: HurstIndex | float, theta: float, alpha: float, t: float) -> float:
    """<u>_t = theta^2 v_{H,alpha} t^(2-2H+2 alpha) for the polynomial drift.

    Raises:
        DomainError: alpha <= H - 1, where <u> does not grow without bound,
            or t < 0.
    """
    hurst = as_hurst(hurst)
    h = hurst.value
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    if alpha <= h - 1.0:
        raise DomainError(f"energy condition needs alpha > H - 1, got alpha={alpha}, H={h}")
    v = poly_coefficients(hurst, alpha).v
    return theta**2 * v * t ** (2.0 - 2.0 * h + 2.0 * alpha)


def q_process(
    drift: DriftSpec,
    path: SamplePath,
    hurst: HurstIndex | float,
    sigma: VolatilitySpec | None = None,
) -> QTrace:
    """Closed form when it applies (polynomial drift, constant sigma), numeric otherwise."""
    sigma = sigma or VolatilitySpec()
    if not drift.is_state_dependent and sigma.family == VolatilityFamily.CONSTANT:
        return q_process_poly(hurst, drift.theta / sigma.value, drift.alpha, path.grid)
    return q_process_numeric(drift, path, hurst, sigma)


def llr_from_path(
    path: SamplePath,
    hurst: HurstIndex | float,
    drift: DriftSpec,
    sigma: VolatilitySpec | None = None,
    *,
    fast: bool = True,
) -> LLRTrace:
    """Full pipeline: path -> zeta -> Q -> (u, <u>)."""
    hurst = as_hurst(hurst)
    sigma = sigma or VolatilitySpec()
    drift.warn_if_not_optimal(hurst.value)

    transform = fundamental_transform_fast if fast else fundamental_transform
    martingale = transform(path, hurst, sigma)
    return llr_trace(q_process(drift, path, hurst, sigma), martingale)


def lorden_slope(hurst: HurstIndex | float, theta: float) -> float:
    """kappa = theta^2 v_{H,H-1/2}: <u>_t = kappa t when alpha = H - 1/2."""
    hurst = as_hurst(hurst)
    kappa = theta**2 * poly_coefficients(hurst, hurst.value - 0.5).v
    if kappa == 0.0 or not math.isfinite(kappa):
        raise ZeroDivisionError(f"signal slope kappa={kappa} (theta={theta})")
    return kappa
