"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np
import pandas as pd

HOUR_NS = 3_600_000_000_000


class InputDataError(ValueError):
    """Input data violates a schema, alignment, or precondition contract."""


class FitError(RuntimeError):
    """A fit cannot be computed: rank deficiency, degenerate sample, no signal."""


def as_float_array(values, name: str = "values", allow_empty: bool = False) -> np.ndarray:
    """Coerce to a 1-D float64 array with finite entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputDataError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size == 0 and not allow_empty:
        raise InputDataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InputDataError(f"{name} contains non-finite entries")
    return arr


def check_hourly(timestamps, name: str = "timestamps") -> pd.DatetimeIndex:
    """Require a non-empty, contiguous hourly DatetimeIndex (strictly increasing)."""
    idx = pd.DatetimeIndex(timestamps)
    if len(idx) == 0:
        raise InputDataError(f"{name} is empty")
    if len(idx) > 1 and not np.all(np.diff(idx.asi8) == HOUR_NS):
        raise InputDataError(f"{name} must advance in contiguous 1-hour steps")
    return idx


def check_same_length(a, b, name_a: str = "first series", name_b: str = "second series") -> None:
    if len(a) != len(b):
        raise InputDataError(f"{name_a} ({len(a)}) and {name_b} ({len(b)}) differ in length")


def check_aligned_timestamps(a, b, name: str = "series") -> None:
    """Timestamps must be identical element-wise."""
    a = pd.DatetimeIndex(a)
    b = pd.DatetimeIndex(b)
    if len(a) != len(b) or not np.array_equal(a.asi8, b.asi8):
        raise InputDataError(f"{name} timestamps are not aligned")


def check_in_range(value: float, lo: float, hi: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or not (lo <= value <= hi):
        raise InputDataError(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


def check_columns(df: pd.DataFrame, required, path) -> None:
    """Require CSV columns by name; the message names the first missing column."""
    for col in required:
        if col not in df.columns:
            raise InputDataError(f"{path}: missing required column '{col}'")
