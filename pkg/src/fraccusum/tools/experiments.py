"""Monte Carlo experiment tools for MCP server."""

import asyncio

from mcp.server.fastmcp import FastMCP
from pydantic import BaseModel, ValidationError

from fraccusum.config import settings
from fraccusum.errors import FracCusumError
from fraccusum.harness.runner import run_experiment
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.enums import DriftFamily, Regime
from fraccusum.models.experiment import EstimandRow, ExperimentConfig
from fraccusum.models.grid import Grid
from fraccusum.tools.tool_names import TOOL_RUN_EXPERIMENT

# Batches run inside the server process; larger ones belong to the CLI
MAX_TOOL_REPLICATES = 2000


class ExperimentResponse(BaseModel):
    """Estimand table of a Monte Carlo batch."""
    threshold: float
    theory_g: float
    theory_h: float
    n_replicates: int
    n_stopped: int
    n_failed: int
    censor_rate: float
    estimands: list[EstimandRow]


def register_experiment_tools(mcp: FastMCP) -> None:
    """Register Monte Carlo experiment tools."""

    regimes = ", ".join(r.value for r in Regime)
    families = ", ".join(f.value for f in DriftFamily)

    @mcp.tool(name=TOOL_RUN_EXPERIMENT, description=f"""Run a small Monte Carlo batch.

    Simulates paths under the chosen regime, runs the CUSUM detector on each
    and compares stopped-replicate means with their closed forms.

    Give exactly one of threshold and gamma.

    Args:
        hurst: Hurst index in [0.01, 0.99]
        regime: One of: {regimes}
        step: Grid step, > 0
        count: Number of grid steps, >= 2
        threshold: CUSUM threshold c (optional)
        gamma: False-alarm budget, calibrated to c (optional)
        drift_family: One of: {families} (default polynomial)
        theta: Polynomial drift amplitude (default 1)
        alpha: Polynomial drift exponent (default 0)
        c0: State drift intercept (default 0)
        c1: State drift slope (default 0)
        power: bounded_power exponent in [0, 1) (default 0)
        sigma: Constant volatility (default 1)
        replicates: Number of replicates, at most {MAX_TOOL_REPLICATES}
        master_seed: Master seed (default FRACCUSUM_SEED)

    Returns:
        Estimand table with estimates, standard errors, theory and z-scores
    """)
    async def run_experiment_tool(
        hurst: float,
        regime: str,
        step: float,
        count: int,
        threshold: float | None = None,
        gamma: float | None = None,
        drift_family: str = DriftFamily.POLYNOMIAL.value,
        theta: float = 1.0,
        alpha: float = 0.0,
        c0: float = 0.0,
        c1: float = 0.0,
        power: float = 0.0,
        sigma: float = 1.0,
        replicates: int = 500,
        master_seed: int | None = None,
    ) -> ExperimentResponse | dict:
        if replicates > MAX_TOOL_REPLICATES:
            return {"error": f"at most {MAX_TOOL_REPLICATES} replicates; use the CLI for more"}
        try:
            config = ExperimentConfig(
                hurst=hurst,
                grid=Grid(step=step, count=count),
                drift=DriftSpec(family=drift_family, theta=theta, alpha=alpha,
                                c0=c0, c1=c1, power=power),
                sigma=VolatilitySpec.constant(sigma),
                regime=regime,
                threshold=threshold,
                gamma=gamma,
                replicates=replicates,
                master_seed=settings.seed if master_seed is None else master_seed,
                workers=settings.workers,
            )
        except ValidationError as e:
            return {"error": str(e)}

        try:
            report = await asyncio.to_thread(run_experiment, config)
        except FracCusumError as e:
            return {"error": str(e)}
        return ExperimentResponse(
            threshold=report.threshold,
            theory_g=report.theory_g,
            theory_h=report.theory_h,
            n_replicates=report.n_replicates,
            n_stopped=report.n_stopped,
            n_failed=report.n_failed,
            censor_rate=report.censor_rate,
            estimands=report.estimands,
        )
