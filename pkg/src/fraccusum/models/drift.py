"""Drift and volatility specifications."""

import warnings

import numpy as np
from pydantic import PositiveFloat, model_validator

from fraccusum.errors import DomainError, OptimalityWarning
from fraccusum.models.base import Base
from fraccusum.models.enums import DriftFamily, VolatilityFamily


class DriftSpec(Base):
    """
    Post-change drift mu_t.

    polynomial:    mu_t = theta * t^alpha (deterministic)
    affine:        mu_t = b(xi_t), b(x) = c0 + c1 x
    bounded_power: mu_t = b(xi_t), b(x) = c0 + c1 x + min(|x|, 1)^power
    """

    family: DriftFamily = DriftFamily.POLYNOMIAL

    # Polynomial amplitude and exponent
    theta: float = 1.0
    alpha: float = 0.0

    # State-dependent coefficients
    c0: float = 0.0
    c1: float = 0.0
    power: float = 0.0

    @model_validator(mode="after")
    def _check_parameters(self) -> "DriftSpec":
        if self.family == DriftFamily.POLYNOMIAL and self.alpha <= -1.0:
            raise ValueError(f"polynomial drift needs alpha > -1, got {self.alpha}")
        if self.family == DriftFamily.BOUNDED_POWER and not 0.0 <= self.power < 1.0:
            raise ValueError(f"bounded_power drift needs 0 <= power < 1, got {self.power}")
        return self

    @classmethod
    def polynomial(cls, theta: float = 1.0, alpha: float = 0.0) -> "DriftSpec":
        return cls(family=DriftFamily.POLYNOMIAL, theta=theta, alpha=alpha)

    @classmethod
    def affine(cls, c0: float, c1: float) -> "DriftSpec":
        return cls(family=DriftFamily.AFFINE, c0=c0, c1=c1)

    @classmethod
    def bounded_power(cls, c0: float, c1: float, power: float) -> "DriftSpec":
        return cls(family=DriftFamily.BOUNDED_POWER, c0=c0, c1=c1, power=power)

    @property
    def is_state_dependent(self) -> bool:
        return self.family != DriftFamily.POLYNOMIAL

    def b(self, x):
        """State drift b(x); works on floats and arrays."""
        if self.family == DriftFamily.AFFINE:
            return self.c0 + self.c1 * x
        if self.family == DriftFamily.BOUNDED_POWER:
            return self.c0 + self.c1 * x + np.minimum(np.abs(x), 1.0) ** self.power
        raise DomainError("polynomial drift is a function of time, not of the state")

    def integral(self, t: np.ndarray) -> np.ndarray:
        """Closed form of int_0^t mu_s ds for the polynomial family."""
        if self.family != DriftFamily.POLYNOMIAL:
            raise DomainError(f"{self.family.value} drift has no closed-form time integral")
        return self.theta * np.power(t, self.alpha + 1.0) / (self.alpha + 1.0)

    def warn_if_not_optimal(self, hurst: float) -> None:
        """Warn when a polynomial drift violates alpha + 1 > H."""
        if self.family == DriftFamily.POLYNOMIAL and self.alpha + 1.0 <= hurst:
            warnings.warn(
                f"alpha + 1 = {self.alpha + 1.0} <= H = {hurst}: the energy condition fails "
                "and the CUSUM test is not optimal for this drift",
                OptimalityWarning,
                stacklevel=2,
            )


class VolatilitySpec(Base):
    """Deterministic, non-vanishing volatility sigma(s)."""

    family: VolatilityFamily = VolatilityFamily.CONSTANT
    value: PositiveFloat = 1.0

    # Values at the grid times t_0..t_n (tabulated family only)
    table: tuple[PositiveFloat, ...] | None = None

    @model_validator(mode="after")
    def _check_table(self) -> "VolatilitySpec":
        tabulated = self.family == VolatilityFamily.TABULATED
        if tabulated and (self.table is None or len(self.table) < 2):
            raise ValueError("tabulated volatility needs a table of at least two positive values")
        return self

    @classmethod
    def constant(cls, value: float = 1.0) -> "VolatilitySpec":
        return cls(family=VolatilityFamily.CONSTANT, value=value)

    @classmethod
    def tabulated(cls, table) -> "VolatilitySpec":
        return cls(family=VolatilityFamily.TABULATED, table=tuple(float(v) for v in table))

    @property
    def is_unit(self) -> bool:
        return self.family == VolatilityFamily.CONSTANT and self.value == 1.0

    def on_cells(self, count: int) -> np.ndarray:
        """sigma at the midpoints of the `count` grid cells."""
        if self.family == VolatilityFamily.CONSTANT:
            return np.full(count, self.value)
        table = np.asarray(self.table)
        if table.size != count + 1:
            raise DomainError(
                f"volatility table has {table.size} values, grid needs {count + 1}"
            )
        return 0.5 * (table[:-1] + table[1:])
