"""CUSUM statistic, stopping rule, threshold calibration and closed-form characteristics.

For a CUSUM test with threshold c, the worst-case K-L detection divergence
is g(c) and the K-L false-alarm divergence is h(c), with

    g(x) = e^-x + x - 1,    h(x) = e^x - x - 1.
"""

import logging
import math

import numpy as np
from scipy.optimize import brentq, root_scalar

from fraccusum.engine.likelihood import lorden_slope
from fraccusum.errors import DomainError
from fraccusum.models.detection import DetectionResult, FalseAlarmBudget, Threshold
from fraccusum.models.grid import HurstIndex
from fraccusum.models.trace import LLRTrace

logger = logging.getLogger(__name__)

# Below this argument g and h use their Taylor series (no cancellation)
_SERIES_CUTOFF = 1e-2


def g_fn(x: float) -> float:
    """g(x) = e^-x + x - 1 for x >= 0."""
    if x < 0.0:
        raise DomainError(f"g is defined for x >= 0, got {x}")
    if x < _SERIES_CUTOFF:
        # x^2/2 - x^3/6 + x^4/24 - x^5/120 + x^6/720
        return x * x * (1 / 2 - x * (1 / 6 - x * (1 / 24 - x * (1 / 120 - x / 720))))
    return math.expm1(-x) + x


def h_fn(x: float) -> float:
    """h(x) = e^x - x - 1 for x >= 0."""
    if x < 0.0:
        raise DomainError(f"h is defined for x >= 0, got {x}")
    if x < _SERIES_CUTOFF:
        return x * x * (1 / 2 + x * (1 / 6 + x * (1 / 24 + x * (1 / 120 + x / 720))))
    return math.expm1(x) - x


def _as_threshold(threshold: Threshold | float) -> Threshold:
    return threshold if isinstance(threshold, Threshold) else Threshold(c=threshold)


def calibrate_threshold(budget: FalseAlarmBudget | float) -> Threshold:
    """Solve h(c) = gamma for the unique c > 0.

    Newton from c0 = log(1 + gamma) converges monotonically after at most one
    overshoot since h is convex and increasing; a Brent solve on a doubled
    bracket takes over if Newton does not meet the tolerance.
    """
    if not isinstance(budget, FalseAlarmBudget):
        budget = FalseAlarmBudget(gamma=budget)
    gamma = budget.gamma
    tolerance = 1e-12 * gamma

    def residual(c: float) -> float:
        return h_fn(abs(c)) - gamma

    c = None
    try:
        solution = root_scalar(
            residual,
            fprime=lambda c: math.expm1(abs(c)),
            x0=math.log1p(gamma),
            method="newton",
            xtol=1e-300,
            rtol=4 * np.finfo(float).eps,
            maxiter=100,
        )
        if solution.converged and solution.root > 0.0:
            c = float(solution.root)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        logger.debug("Newton calibration failed for gamma=%r: %s", gamma, e)

    if c is None or abs(h_fn(c) - gamma) > tolerance:
        upper = 1.0
        while h_fn(upper) < gamma:
            upper *= 2.0
        c = float(brentq(residual, 0.0, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps))
        logger.debug("Calibrated gamma=%r by bracketing: c=%r", gamma, c)

    return Threshold(c=c)


def cusum_statistic(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(y, running_min) with running_min[n] = min_{k<=n} u[k] and y = u - running_min."""
    running_min = np.minimum.accumulate(u)
    return u - running_min, running_min


def cusum_run(
    llr: LLRTrace,
    threshold: Threshold | float,
    *,
    monitor_every: int = 1,
) -> DetectionResult:
    """Run the CUSUM stopping rule S_c = inf{t : y_t >= c} over a trace.

    Only indices that are multiples of `monitor_every` are tested, which
    models a detector updated every d sampling periods. A trace that never
    crosses yields stopped=False.
    """
    c = _as_threshold(threshold).c
    if monitor_every < 1:
        raise DomainError(f"monitor_every must be >= 1, got {monitor_every}")

    y, running_min = cusum_statistic(llr.u)
    crossed = y[::monitor_every] >= c
    if not crossed.any():
        return DetectionResult(
            stopped=False, y=y, running_min=running_min, monitor_every=monitor_every
        )

    k = int(np.argmax(crossed)) * monitor_every
    return DetectionResult(
        stopped=True,
        y=y,
        running_min=running_min,
        stop_index=k,
        stop_time=k * llr.grid.step,
        overshoot=float(y[k] - c),
        qv_at_stop=float(llr.qv_u[k]),
        u_at_stop=float(llr.u[k]),
        monitor_every=monitor_every,
    )


def theoretical_characteristics(threshold: Threshold | float) -> tuple[float, float]:
    """(K-L detection divergence g(c), K-L false-alarm divergence h(c))."""
    c = _as_threshold(threshold).c
    return g_fn(c), h_fn(c)


def lorden_characteristics_poly(
    hurst: HurstIndex | float,
    theta: float,
    threshold: Threshold | float,
) -> tuple[float, float]:
    """Real-time (expected delay, expected time to false alarm) when alpha = H - 1/2.

    Then <u>_t = kappa t with kappa = theta^2 v_{H,H-1/2}, and the K-L
    characteristics convert to real time as 2 g(c) / kappa and 2 h(c) / kappa.

    Raises:
        ZeroDivisionError: theta = 0.
    """
    if theta == 0.0:
        raise ZeroDivisionError("theta = 0 carries no signal; delay and false alarm are infinite")
    kappa = lorden_slope(hurst, theta)
    g, h = theoretical_characteristics(threshold)
    return 2.0 * g / kappa, 2.0 * h / kappa
