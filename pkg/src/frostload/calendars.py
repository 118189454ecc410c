"""Calendar helpers: winter masks, hour-of-year, event-year attribution, holidays."""

from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np
import pandas as pd

from .validation import InputDataError

WINTER_MONTHS = (12, 1, 2)

# Hours in a non-leap year; seasonal terms cap the hour-of-year here so the
# cycle period stays 8760 h on leap years.
HOURS_PER_YEAR = 8760


def winter_mask(timestamps) -> np.ndarray:
    """Boolean mask of winter hours (December through February)."""
    months = pd.DatetimeIndex(timestamps).month
    return np.isin(months, WINTER_MONTHS)


def hour_of_year(timestamps) -> np.ndarray:
    """1-based hour within the calendar year (1 at Jan 1 00:00, up to 8784)."""
    idx = pd.DatetimeIndex(timestamps)
    year_starts = pd.to_datetime({"year": idx.year, "month": 1, "day": 1})
    return ((idx.asi8 - year_starts.values.astype("datetime64[ns]").astype(np.int64))
            // 3_600_000_000_000 + 1).astype(np.int64)


def seasonal_angle(timestamps) -> np.ndarray:
    """2*pi*h/8760 with the hour-of-year capped at 8760 on leap years."""
    h = np.minimum(hour_of_year(timestamps), HOURS_PER_YEAR)
    return 2.0 * np.pi * h / HOURS_PER_YEAR


def event_year(timestamps) -> np.ndarray:
    """Winter-season label: December counts toward the following year.

    Dec 1950 + Jan/Feb 1951 form event-year 1951, so labels match the year
    in which a cold-spell peak (Jan/Feb) falls.
    """
    idx = pd.DatetimeIndex(timestamps)
    years = idx.year.to_numpy(dtype=np.int64)
    return np.where(idx.month.to_numpy() == 12, years + 1, years)


def read_holidays_file(path) -> frozenset[dt.date]:
    """Read a holiday calendar: one ISO date per line, '#' comments allowed."""
    days = set()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            days.add(dt.date.fromisoformat(line))
        except ValueError as exc:
            raise InputDataError(f"{path}:{lineno}: invalid date '{line}'") from exc
    return frozenset(days)
