"""Base model and shared field types."""

from typing import Annotated

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer


def _as_float_array(value) -> np.ndarray:
    """Copy into a read-only 1-D float64 array."""
    array = np.array(value, dtype=np.float64)
    if array.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {array.shape}")
    array.setflags(write=False)
    return array


# Immutable float vector; serialized as a plain list
FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]


class Base(BaseModel):
    """Base class for all domain models."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
