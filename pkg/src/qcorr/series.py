"""Core value types: uniformly sampled time series and probability levels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProbabilityLevel:
    """A probability in [0, 1], used as a quantile level."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise ValueError(f"probability level must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "p", p)

    def __float__(self) -> float:
        return self.p


def as_level(level: float | ProbabilityLevel) -> ProbabilityLevel:
    if isinstance(level, ProbabilityLevel):
        return level
    return ProbabilityLevel(float(level))


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real-valued observations on a uniform grid.

    ``step`` is the spacing in seconds per observation and is purely
    informational; all lag arithmetic is done in observation steps.
    """

    values: np.ndarray
    step: float = 1.0
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError(f"values must be one-dimensional, got shape {values.shape}")
        if values.size < 2:
            raise ValueError(f"a time series needs at least 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must all be finite (no NaN/inf markers)")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValueError(f"step must be a positive real, got {self.step!r}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", float(self.step))

    def __len__(self) -> int:
        return int(self.values.size)


def as_values(x: TimeSeries | np.ndarray | list) -> np.ndarray:
    """Coerce a TimeSeries or array-like to a 1-d float array.

    Raises ValueError("empty input") for empty inputs so callers get the
    documented error without constructing a TimeSeries first.
    """
    if isinstance(x, TimeSeries):
        return x.values
    values = np.asarray(x, dtype=float)
    if values.ndim != 1:
        raise ValueError(f"expected a one-dimensional series, got shape {values.shape}")
    if values.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must all be finite")
    return values
