"""CUSUM threshold, false-alarm budget and detection result."""

from pydantic import Field, PositiveFloat

from fraccusum.models.base import Base, FloatArray


class Threshold(Base):
    """CUSUM threshold c > 0."""
    c: PositiveFloat


class FalseAlarmBudget(Base):
    """K-L false-alarm divergence constraint gamma > 0."""
    gamma: PositiveFloat


class DetectionResult(Base):
    """
    Outcome of one CUSUM run over a finite trace.

    y[n] = u[n] - running_min[n]. When no crossing happens on the grid,
    stopped is False and every optional field is None.
    """

    stopped: bool
    y: FloatArray
    running_min: FloatArray

    stop_index: int | None = None
    stop_time: float | None = None

    # y at the stop index minus c (zero only in continuous time)
    overshoot: float | None = None

    # <u> and u at the stop index
    qv_at_stop: float | None = None
    u_at_stop: float | None = None

    # CUSUM is tested at indices that are multiples of this period
    monitor_every: int = Field(default=1, ge=1)

    def summary(self) -> dict:
        """JSON-ready summary without the full y / running_min paths."""
        return self.model_dump(mode="json", exclude={"y", "running_min"})
