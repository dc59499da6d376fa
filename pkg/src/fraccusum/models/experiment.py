"""Monte Carlo experiment configuration and report."""

import math
from collections.abc import Mapping

from pydantic import (
    Field,
    PositiveFloat,
    ValidationError,
    computed_field,
    field_validator,
    model_validator,
)

from fraccusum.errors import ConfigError
from fraccusum.models.base import Base
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.enums import Regime, Sampler, VolatilityFamily
from fraccusum.models.grid import Grid, HurstIndex

# Sections of an experiment config file, mirroring the model's nested fields
CONFIG_SECTIONS = ("experiment", "grid", "drift", "sigma")


class ExperimentConfig(Base):
    """
    One Monte Carlo batch: model, regime, grid, detector and seeding.

    Exactly one of `threshold` (c) and `gamma` (false-alarm budget, calibrated
    to c) must be given. `workers` only affects scheduling, so it is excluded
    from serialization and never changes a report.
    """

    hurst: float
    grid: Grid
    drift: DriftSpec = Field(default_factory=DriftSpec)
    sigma: VolatilitySpec = Field(default_factory=VolatilitySpec)
    regime: Regime = Regime.PRE_CHANGE

    threshold: PositiveFloat | None = None
    gamma: PositiveFloat | None = None

    replicates: int = Field(default=1, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1, exclude=True)

    # Increments drawn per replicate before truncation to grid.count; holding it
    # fixed keeps each replicate's noise prefix identical across horizons
    stream_steps: int | None = Field(default=None, ge=2)

    monitor_every: int = Field(default=1, ge=1)
    sampler: Sampler = Sampler.CIRCULANT

    @field_validator("hurst")
    @classmethod
    def _check_hurst(cls, v: float) -> float:
        return HurstIndex(value=v).value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if (self.threshold is None) == (self.gamma is None):
            raise ValueError("give exactly one of threshold and gamma")
        if self.stream_steps is not None and self.stream_steps < self.grid.count:
            raise ValueError(
                f"stream_steps ({self.stream_steps}) is shorter than the grid ({self.grid.count})"
            )
        if (
            self.sigma.family == VolatilityFamily.TABULATED
            and len(self.sigma.table) != self.grid.count + 1
        ):
            raise ValueError("volatility table length must be grid.count + 1")
        return self

    @computed_field
    @property
    def horizon(self) -> float:
        return self.grid.horizon

    @property
    def tau(self) -> float:
        return 0.0 if self.regime == Regime.POST_CHANGE_AT_ZERO else math.inf

    @classmethod
    def from_sections(cls, sections: Mapping[str, Mapping]) -> "ExperimentConfig":
        """Build from config-file sections; any inconsistency raises ConfigError.

        The [grid] section takes any two of step, count and horizon; when all
        three are given they must agree.
        """
        unknown = set(sections) - set(CONFIG_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")

        data = dict(sections.get("experiment", {}))
        allowed = set(cls.model_fields) - {"grid", "drift", "sigma"}
        bad_keys = set(data) - allowed
        if bad_keys:
            raise ConfigError(f"unknown [experiment] keys: {sorted(bad_keys)}")

        grid = dict(sections.get("grid", {}))
        horizon = grid.pop("horizon", None)
        if horizon is not None:
            if "count" not in grid and "step" in grid:
                grid["count"] = round(horizon / grid["step"])
            elif "step" not in grid and "count" in grid:
                grid["step"] = horizon / grid["count"]

        try:
            config = cls(
                grid=grid,
                drift=dict(sections.get("drift", {})),
                sigma=dict(sections.get("sigma", {})),
                **data,
            )
        except ValidationError as e:
            raise ConfigError(str(e)) from e

        if horizon is not None and not math.isclose(horizon, config.grid.horizon, rel_tol=1e-9):
            raise ConfigError(
                f"horizon {horizon} does not equal step * count = {config.grid.horizon}"
            )
        return config


class EstimandRow(Base):
    """One estimated quantity, compared with its closed form when one exists."""
    name: str
    estimate: float | None
    std_error: float | None
    theory: float | None = None
    z_score: float | None = None
    n: int
    censor_rate: float


class ReplicateSummary(Base):
    """Per-replicate statistics kept in the report (full paths are not)."""
    index: int
    stopped: bool
    stop_index: int | None = None
    stop_time: float | None = None
    qv_at_stop: float | None = None
    u_at_stop: float | None = None
    overshoot: float | None = None


class ReplicateFailure(Base):
    """A replicate that raised instead of producing a summary."""
    index: int
    error: str


class ExperimentReport(Base):
    """Aggregated Monte Carlo estimates with standard errors and theory."""

    config: ExperimentConfig
    threshold: float

    n_replicates: int
    n_stopped: int
    n_failed: int

    # Fraction of non-failed replicates that never crossed the threshold
    censor_rate: float

    # Closed forms g(c) and h(c)
    theory_g: float
    theory_h: float

    estimands: list[EstimandRow] = []
    replicates: list[ReplicateSummary] = []
    failures: list[ReplicateFailure] = []

    def estimand(self, name: str) -> EstimandRow | None:
        """Look up an estimand row by name."""
        for row in self.estimands:
            if row.name == name:
                return row
        return None
