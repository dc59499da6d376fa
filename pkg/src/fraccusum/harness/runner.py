"""Seeded, parallel Monte Carlo batches of the detection pipeline."""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np
from numpy.linalg import LinAlgError

from fraccusum.engine.cusum import calibrate_threshold, cusum_run, theoretical_characteristics
from fraccusum.engine.fbm import apply_volatility, inject_drift, sample_fbm, sample_fbm_exact
from fraccusum.engine.likelihood import llr_from_path, lorden_slope
from fraccusum.errors import EmbeddingNotPSD, FracCusumError
from fraccusum.harness.report import canonical_json
from fraccusum.models.enums import DriftFamily, Regime, Sampler, VolatilityFamily
from fraccusum.models.experiment import (
    EstimandRow,
    ExperimentConfig,
    ExperimentReport,
    ReplicateFailure,
    ReplicateSummary,
)
from fraccusum.models.grid import SamplePath, Seed
from fraccusum.utils import mean_and_stderr

logger = logging.getLogger(__name__)

ReplicateOutcome = ReplicateSummary | ReplicateFailure


def _sample(config: ExperimentConfig, seed: Seed) -> SamplePath:
    if config.sampler == Sampler.EXACT:
        return sample_fbm_exact(config.hurst, config.grid, seed)
    try:
        return sample_fbm(config.hurst, config.grid, seed, stream_count=config.stream_steps)
    except EmbeddingNotPSD as e:
        logger.warning("Replicate %d: %s; falling back to the exact sampler",
                       seed.replicate_index, e)
        return sample_fbm_exact(config.hurst, config.grid, seed)


def run_replicate(config: ExperimentConfig, threshold: float, index: int) -> ReplicateSummary:
    """Sample, inject drift per regime, transform, build the LLR and run CUSUM."""
    seed = Seed(master_seed=config.master_seed, replicate_index=index)
    path = apply_volatility(_sample(config, seed), config.sigma)
    path = inject_drift(path, config.drift, config.tau)

    llr = llr_from_path(path, config.hurst, config.drift, config.sigma)
    result = cusum_run(llr, threshold, monitor_every=config.monitor_every)

    return ReplicateSummary(
        index=index,
        stopped=result.stopped,
        stop_index=result.stop_index,
        stop_time=result.stop_time,
        qv_at_stop=result.qv_at_stop,
        u_at_stop=result.u_at_stop,
        overshoot=result.overshoot,
    )


def _run_one(config: ExperimentConfig, threshold: float, index: int) -> ReplicateOutcome:
    try:
        return run_replicate(config, threshold, index)
    except (FracCusumError, ArithmeticError, ValueError, LinAlgError) as e:
        logger.warning("Replicate %d failed: %s: %s", index, type(e).__name__, e)
        return ReplicateFailure(index=index, error=f"{type(e).__name__}: {e}")


def _run_chunk(
    config: ExperimentConfig,
    threshold: float,
    start: int,
    stop: int,
) -> list[ReplicateOutcome]:
    """Worker entry point: replicates start..stop-1."""
    return [_run_one(config, threshold, index) for index in range(start, stop)]


def _resolve_threshold(config: ExperimentConfig) -> float:
    if config.threshold is not None:
        return config.threshold
    return calibrate_threshold(config.gamma).c


def _lorden_theory(config: ExperimentConfig, g: float, h: float) -> float | None:
    """Real-time stop-time theory for the polynomial drift with alpha = H - 1/2."""
    drift, sigma = config.drift, config.sigma
    if drift.family != DriftFamily.POLYNOMIAL or sigma.family != VolatilityFamily.CONSTANT:
        return None
    if not math.isclose(drift.alpha, config.hurst - 0.5, rel_tol=0.0, abs_tol=1e-12):
        return None
    try:
        kappa = lorden_slope(config.hurst, drift.theta / sigma.value)
    except ZeroDivisionError:
        return None
    divergence = h if config.regime == Regime.PRE_CHANGE else g
    return 2.0 * divergence / kappa


def _estimand(
    name: str,
    values: np.ndarray,
    theory: float | None,
    censor_rate: float,
) -> EstimandRow:
    estimate, std_error = mean_and_stderr(values)
    z_score = None
    if theory is not None and estimate is not None and std_error:
        z_score = (estimate - theory) / std_error
    return EstimandRow(
        name=name,
        estimate=estimate,
        std_error=std_error,
        theory=theory,
        z_score=z_score,
        n=int(values.size),
        censor_rate=censor_rate,
    )


def _estimands(
    config: ExperimentConfig,
    stopped: list[ReplicateSummary],
    g: float,
    h: float,
    censor_rate: float,
) -> list[EstimandRow]:
    """Stopped-replicate means, each against its closed form where one exists.

    Under the pre-change law E[-u_S] = 1/2 E[<u>_S] = h(c); under the
    post-change law at 0, E[u_S] = 1/2 E[<u>_S] = g(c). wald_gap is the
    per-replicate difference of the two sides and has mean 0 in both regimes.
    """
    half_qv = np.array([0.5 * r.qv_at_stop for r in stopped])
    u = np.array([r.u_at_stop for r in stopped])
    stop_time = np.array([r.stop_time for r in stopped])
    overshoot = np.array([r.overshoot for r in stopped])

    if config.regime == Regime.PRE_CHANGE:
        divergence, signed_u, u_name = h, -u, "neg_u_at_stop"
    else:
        divergence, signed_u, u_name = g, u, "u_at_stop"

    return [
        _estimand("half_qv_at_stop", half_qv, divergence, censor_rate),
        _estimand(u_name, signed_u, divergence, censor_rate),
        _estimand("wald_gap", signed_u - half_qv, 0.0, censor_rate),
        _estimand("stop_time", stop_time, _lorden_theory(config, g, h), censor_rate),
        _estimand("overshoot", overshoot, None, censor_rate),
    ]


def _collect(config: ExperimentConfig, threshold: float) -> list[ReplicateOutcome]:
    n, workers = config.replicates, config.workers
    if workers == 1 or n == 1:
        return _run_chunk(config, threshold, 0, n)

    # A few chunks per worker keep the pool busy without per-replicate overhead
    chunk = max(1, math.ceil(n / (4 * workers)))
    outcomes: list[ReplicateOutcome] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(_run_chunk, config, threshold, start, min(start + chunk, n))
            for start in range(0, n, chunk)
        ]
        for future in as_completed(futures):
            outcomes.extend(future.result())
    return sorted(outcomes, key=lambda outcome: outcome.index)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run a Monte Carlo batch and aggregate it into a report.

    Deterministic given the config: each replicate's noise depends only on
    (master_seed, replicate index), and aggregation follows the replicate
    order, so the worker count never changes the report. Replicates that
    raise are logged and recorded as failures instead of aborting the batch.
    """
    threshold = _resolve_threshold(config)
    g, h = theoretical_characteristics(threshold)
    logger.info(
        "Running %d replicates (H=%s, regime=%s, c=%r) on %d worker(s)",
        config.replicates, config.hurst, config.regime.value, threshold, config.workers,
    )

    outcomes = _collect(config, threshold)
    summaries = [o for o in outcomes if isinstance(o, ReplicateSummary)]
    failures = [o for o in outcomes if isinstance(o, ReplicateFailure)]
    stopped = [s for s in summaries if s.stopped]

    censored = len(summaries) - len(stopped)
    censor_rate = censored / len(summaries) if summaries else 0.0
    if censor_rate > 0.01:
        logger.warning("Censor rate %.2f%% exceeds 1%%: extend the horizon", 100 * censor_rate)

    report = ExperimentReport(
        config=config.model_copy(update={"workers": 1}),
        threshold=threshold,
        n_replicates=config.replicates,
        n_stopped=len(stopped),
        n_failed=len(failures),
        censor_rate=censor_rate,
        theory_g=g,
        theory_h=h,
        estimands=_estimands(config, stopped, g, h, censor_rate),
        replicates=summaries,
        failures=failures,
    )
    logger.info("Finished: %d stopped, %d censored, %d failed",
                len(stopped), censored, len(failures))
    return report


def scheduling_invariance_check(config: ExperimentConfig) -> bool:
    """True iff the canonical report is identical for 1, 2 and all-CPU workers."""
    counts = sorted({1, 2, os.cpu_count() or 1})
    reports = {
        canonical_json(run_experiment(config.model_copy(update={"workers": workers})))
        for workers in counts
    }
    return len(reports) == 1
