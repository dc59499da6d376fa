"""Shared utility functions."""

import json
import math

import numpy as np


def fmt_real(value: float | None) -> str:
    """Format a real at 17 significant digits; None becomes an empty string.

    17 digits identify every IEEE double uniquely, so text written with this
    function reproduces the exact binary value when parsed back.
    """
    if value is None:
        return ""
    return format(float(value), ".17g")


def _encode(value, level: int, indent: int) -> str:
    if isinstance(value, float):
        return fmt_real(value) if math.isfinite(value) else "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = " " * (indent * (level + 1))
        items = [
            f"{pad}{json.dumps(str(key))}: {_encode(item, level + 1, indent)}"
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + " " * (indent * level) + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        pad = " " * (indent * (level + 1))
        items = [f"{pad}{_encode(item, level + 1, indent)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + " " * (indent * level) + "]"
    return json.dumps(value)


def dumps_real(value, indent: int = 2) -> str:
    """JSON text of plain data with every float written by fmt_real.

    Non-finite floats become null. Layout matches json.dumps(value, indent=indent).
    """
    return _encode(value, 0, indent)


def mean_and_stderr(values: np.ndarray) -> tuple[float | None, float | None]:
    """Sample mean and its standard error (replicate-level variance).

    Returns (None, None) for an empty sample and (mean, None) for a single value.
    """
    n = values.size
    if n == 0:
        return None, None
    mean = float(np.mean(values))
    if n < 2:
        return mean, None
    return mean, float(np.std(values, ddof=1) / math.sqrt(n))
