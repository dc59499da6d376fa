"""Enums for domain models."""

import enum


class DriftFamily(str, enum.Enum):
    """Post-change drift family."""
    POLYNOMIAL = "polynomial"  # mu_t = theta * t^alpha
    AFFINE = "affine"  # b(x) = c0 + c1 x, fractional Ornstein-Uhlenbeck
    BOUNDED_POWER = "bounded_power"  # b(x) = c0 + c1 x + min(|x|, 1)^power


class VolatilityFamily(str, enum.Enum):
    """Deterministic volatility family."""
    CONSTANT = "constant"
    TABULATED = "tabulated"  # positive values at the grid times


class Regime(str, enum.Enum):
    """Which law generates the Monte Carlo paths."""
    PRE_CHANGE = "pre_change"  # tau = infinity, false-alarm side
    POST_CHANGE_AT_ZERO = "post_change_at_zero"  # tau = 0, worst-case delay side


class Sampler(str, enum.Enum):
    """fBm sampler used by the harness."""
    CIRCULANT = "circulant"  # O(n log n), falls back to exact on embedding failure
    EXACT = "exact"  # Cholesky, O(n^3)


class ReportFormat(str, enum.Enum):
    """Report file format."""
    CSV = "csv"
    JSON = "json"
