"""Hurst index, time grid, seeds and sample paths."""

import math

import numpy as np
from pydantic import Field, PositiveFloat, ValidationError, field_validator, model_validator

from fraccusum.errors import DomainError
from fraccusum.models.base import Base, FloatArray
from fraccusum.models.drift import DriftSpec

# Numerical guard: kernel exponents 1/2 - H stay away from +-1/2
HURST_MIN = 0.01
HURST_MAX = 0.99


class HurstIndex(Base):
    """Hurst index H of the driving fractional Brownian motion."""

    value: float

    @field_validator("value")
    @classmethod
    def _guard(cls, v: float) -> float:
        if not HURST_MIN <= v <= HURST_MAX:
            raise ValueError(f"Hurst index {v} outside [{HURST_MIN}, {HURST_MAX}]")
        return v

    @property
    def kernel_exponent(self) -> float:
        """1/2 - H, the exponent of both factors of k_H."""
        return 0.5 - self.value


def as_hurst(hurst: "HurstIndex | float") -> HurstIndex:
    """Accept a HurstIndex or a bare float; out-of-range values raise DomainError."""
    if isinstance(hurst, HurstIndex):
        return hurst
    try:
        return HurstIndex(value=hurst)
    except ValidationError as e:
        raise DomainError(f"invalid Hurst index {hurst!r}") from e


class Grid(Base):
    """Uniform grid t_j = j * step, j = 0..count."""

    step: PositiveFloat
    count: int = Field(ge=2)

    @classmethod
    def from_horizon(cls, horizon: float, count: int) -> "Grid":
        return cls(step=horizon / count, count=count)

    @property
    def horizon(self) -> float:
        return self.step * self.count

    def times(self) -> np.ndarray:
        return np.arange(self.count + 1) * self.step

    def midpoints(self) -> np.ndarray:
        """Cell midpoints s_j* = (j + 1/2) step, j = 0..count-1."""
        return (np.arange(self.count) + 0.5) * self.step


class Seed(Base):
    """Replicate seed; identical seeds reproduce bit-identical paths."""

    master_seed: int = Field(ge=0, lt=2**64)
    replicate_index: int = Field(default=0, ge=0)

    def generator(self) -> np.random.Generator:
        """Counter-based Philox stream keyed by (master_seed, replicate_index).

        The stream depends on the replicate index only, never on which worker
        draws from it, and equals the replicate_index-th child of the master
        SeedSequence.
        """
        sequence = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.replicate_index,),
        )
        return np.random.Generator(np.random.Philox(sequence))


class SamplePath(Base):
    """Observed path xi on a uniform grid, with change-point metadata."""

    grid: Grid
    values: FloatArray
    change_point: float = math.inf
    drift: DriftSpec | None = None

    @model_validator(mode="after")
    def _check_values(self) -> "SamplePath":
        if self.values.size != self.grid.count + 1:
            raise ValueError(
                f"path has {self.values.size} values, grid needs {self.grid.count + 1}"
            )
        if self.values[0] != 0.0:
            raise ValueError(f"path must start at 0, got {self.values[0]}")
        if not 0.0 <= self.change_point:
            raise ValueError(f"change point must be in [0, inf], got {self.change_point}")
        return self

    def increments(self) -> np.ndarray:
        return np.diff(self.values)
