"""Constants and discretized traces of the transform and likelihood pipeline."""

import numpy as np
from pydantic import PositiveFloat, model_validator

from fraccusum.models.base import Base, FloatArray
from fraccusum.models.grid import Grid


class FracConstants(Base):
    """Positive constants c_H and lambda_H of the fundamental martingale."""
    c_h: PositiveFloat
    lambda_h: PositiveFloat


class PolyCoefficients(Base):
    """Closed-form coefficients of the polynomial drift t^alpha.

    Q_t = d * t^alpha and int_0^t Q_s^2 d<zeta>_s = v * t^(2 - 2H + 2 alpha).
    """
    d: float
    v: float


class MartingaleTrace(Base):
    """Fundamental martingale zeta and its deterministic quadratic variation."""

    grid: Grid
    zeta: FloatArray
    qv: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "MartingaleTrace":
        n = self.grid.count + 1
        if self.zeta.size != n or self.qv.size != n:
            raise ValueError("martingale trace length does not match the grid")
        if self.zeta[0] != 0.0 or self.qv[0] != 0.0:
            raise ValueError("zeta and <zeta> must start at 0")
        if not np.all(np.diff(self.qv) > 0.0):
            raise ValueError("<zeta> must be strictly increasing")
        return self


class QTrace(Base):
    """Q process at the grid times."""

    grid: Grid
    q: FloatArray

    # True when Q is infinite at t = 0 (alpha < 0) and q[0] holds 0 instead
    singular_origin: bool = False

    @model_validator(mode="after")
    def _check(self) -> "QTrace":
        if self.q.size != self.grid.count + 1:
            raise ValueError("Q trace length does not match the grid")
        if not np.isfinite(self.q[0]):
            raise ValueError("Q at the origin must be finite")
        return self


class LLRTrace(Base):
    """Log-likelihood ratio u and its accumulated quadratic variation <u>."""

    grid: Grid
    u: FloatArray
    qv_u: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "LLRTrace":
        n = self.grid.count + 1
        if self.u.size != n or self.qv_u.size != n:
            raise ValueError("LLR trace length does not match the grid")
        if self.u[0] != 0.0 or self.qv_u[0] != 0.0:
            raise ValueError("u and <u> must start at 0")
        if np.any(np.diff(self.qv_u) < 0.0):
            raise ValueError("<u> must be nondecreasing")
        return self
