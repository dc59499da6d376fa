"""Exceptions raised by fraccusum.

Each error also derives from the closest builtin, so callers may catch
either the fraccusum class or e.g. ``ValueError``.
"""


class FracCusumError(Exception):
    """Base class for all fraccusum errors."""


class DomainError(FracCusumError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class EmbeddingNotPSD(FracCusumError, ArithmeticError):
    """Circulant embedding produced eigenvalues negative beyond tolerance."""


class SizeLimitExceeded(FracCusumError, ValueError):
    """Grid too large for the cubic-cost exact sampler."""


class UnsupportedTau(FracCusumError, ValueError):
    """Change point other than 0 or infinity was requested."""


class GridMismatch(FracCusumError, ValueError):
    """Two traces that must share a grid do not."""


class ConfigError(FracCusumError, ValueError):
    """Experiment or CLI configuration is inconsistent."""


class PathFileError(FracCusumError, ValueError):
    """A path CSV file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ReportIOError(FracCusumError, OSError):
    """A report could not be written."""


class OptimalityWarning(UserWarning):
    """Detector is run outside the parameter range where it is proven optimal."""
