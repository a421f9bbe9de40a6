"""Extended non-negative failure times.

A failure time is a float: a finite value ``t >= 0`` or ``math.inf`` for an
event that never occurs. Floats give the required total order, and ``min`` /
``max`` have the identities ``inf`` and ``0.0``.
"""
from __future__ import annotations

import math
from typing import Mapping, Union

import numpy as np

ExtTime = float
TimeLike = Union[float, np.ndarray]
Assignment = Mapping[str, float]

NEVER_TIME: ExtTime = math.inf
ALWAYS_TIME: ExtTime = 0.0


def ext_time(value: float) -> ExtTime:
    value = float(value)
    if math.isnan(value):
        raise ValueError("failure time cannot be NaN")
    if value < 0:
        raise ValueError(f"failure time must be non-negative, got {value}")
    return value


def is_never(value: float) -> bool:
    return math.isinf(value)
