"""Gridded hourly temperature fields and weighted temperature indices.

A rectangular lattice of grid cells carries hourly temperatures; site lists
(population centres, power plants, gas fields) are folded into normalized
per-cell weight maps, and weighted indices drive the demand and outage
models downstream. A seeded synthetic generator produces desk-scale fields
with injectable cold spells for testing and demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from .calendars import hour_of_year, HOURS_PER_YEAR
from .validation import (
    InputDataError,
    as_float_array,
    check_columns,
    check_hourly,
    check_in_range,
)

TEMP_BOUNDS_C = (-60.0, 60.0)

# Hour-of-year of the seasonal minimum used by the synthetic generator
# (mid-January, matching the climatology of continental cold spells).
COLDEST_HOUR_OF_YEAR = 360
COLDEST_HOUR_OF_DAY = 5


@dataclass(frozen=True)
class Grid:
    """Rectangular lattice of cell centres (latitudes x longitudes)."""

    lats: tuple[float, ...]
    lons: tuple[float, ...]

    def __post_init__(self):
        if len(self.lats) == 0 or len(self.lons) == 0:
            raise InputDataError("grid must have at least one latitude and one longitude")
        if list(self.lats) != sorted(self.lats) or list(self.lons) != sorted(self.lons):
            raise InputDataError("grid axes must be sorted ascending")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.lats), len(self.lons))

    def nearest_cell(self, lat: float, lon: float) -> tuple[int, int]:
        """Indices of the cell centre closest to (lat, lon) along each axis."""
        if not (self.lats[0] <= lat <= self.lats[-1] and self.lons[0] <= lon <= self.lons[-1]):
            raise InputDataError(
                f"site ({lat}, {lon}) lies outside the grid bounding box "
                f"[{self.lats[0]}, {self.lats[-1]}] x [{self.lons[0]}, {self.lons[-1]}]"
            )
        i = int(np.argmin(np.abs(np.asarray(self.lats) - lat)))
        j = int(np.argmin(np.abs(np.asarray(self.lons) - lon)))
        return i, j


@dataclass
class TemperatureField:
    """Hourly temperatures on a grid; values indexed (hour, lat, lon)."""

    grid: Grid
    values: np.ndarray
    timestamps: pd.DatetimeIndex

    def __post_init__(self):
        self.timestamps = check_hourly(self.timestamps, "field timestamps")
        self.values = np.asarray(self.values, dtype=float)
        expected = (len(self.timestamps),) + self.grid.shape
        if self.values.shape != expected:
            raise InputDataError(
                f"field values shape {self.values.shape} does not match {expected}"
            )
        if not np.all(np.isfinite(self.values)):
            raise InputDataError("field contains non-finite temperatures")
        lo, hi = TEMP_BOUNDS_C
        if self.values.min() < lo or self.values.max() > hi:
            raise InputDataError(f"temperatures outside physical bounds [{lo}, {hi}] degC")

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class WeightMap:
    """Non-negative per-cell weights, stored normalized to sum 1."""

    grid: Grid
    weights: np.ndarray
    label: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != self.grid.shape:
            raise InputDataError(f"weights shape {w.shape} does not match grid {self.grid.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputDataError("weights must be finite and non-negative")
        total = w.sum()
        if total <= 0:
            raise InputDataError("at least one weight must be positive")
        self.weights = w / total


@dataclass
class WeightedTemperatureSeries:
    """Hourly weighted temperature index with its weighting basis label."""

    values: np.ndarray
    timestamps: pd.DatetimeIndex
    basis: str

    def __post_init__(self):
        self.timestamps = check_hourly(self.timestamps, "series timestamps")
        self.values = as_float_array(self.values, "series values")
        if len(self.values) != len(self.timestamps):
            raise InputDataError("series values and timestamps differ in length")

    def __len__(self) -> int:
        return len(self.values)


def build_weight_map(
    sites: Sequence[tuple[float, float, float]],
    grid: Grid,
    region_split: float | None = None,
    label: str = "sites",
):
    """Fold site weights onto the grid by nearest cell.

    Parameters
    ----------
    sites : sequence of (lat, lon, weight)
        Raw site weights; must be non-negative with a positive sum.
    grid : Grid
        Target lattice; every site must fall inside its bounding box.
    region_split : float, optional
        Latitude splitting the sites into two independently normalized maps.
        Sites at or north of the split latitude go north.
    label : str
        Basis label; split maps get ``-north``/``-south`` suffixes.

    Returns
    -------
    WeightMap or (WeightMap, WeightMap)
        One map, or ``(north, south)`` when ``region_split`` is given.
    """
    sites = list(sites)
    if not sites:
        raise InputDataError("site list is empty")

    def accumulate(subset, sublabel):
        if not subset:
            raise InputDataError(f"no sites on the {sublabel} side of latitude {region_split}")
        w = np.zeros(grid.shape)
        for lat, lon, weight in subset:
            if weight < 0 or not np.isfinite(weight):
                raise InputDataError(f"site ({lat}, {lon}) has invalid weight {weight}")
            i, j = grid.nearest_cell(lat, lon)
            w[i, j] += weight
        if w.sum() <= 0:
            raise InputDataError(f"all site weights are zero ({sublabel})")
        return w

    if region_split is None:
        return WeightMap(grid, accumulate(sites, label), label)

    north = [s for s in sites if s[0] >= region_split]
    south = [s for s in sites if s[0] < region_split]
    return (
        WeightMap(grid, accumulate(north, f"{label}-north"), f"{label}-north"),
        WeightMap(grid, accumulate(south, f"{label}-south"), f"{label}-south"),
    )


def weighted_index(field: TemperatureField, wmap: WeightMap) -> WeightedTemperatureSeries:
    """Weight-sum of cell temperatures per hour."""
    if wmap.grid != field.grid:
        raise InputDataError("weight map grid does not match temperature field grid")
    values = np.einsum("tij,ij->t", field.values, wmap.weights)
    return WeightedTemperatureSeries(values, field.timestamps, wmap.label)


def apply_trend(
    series: WeightedTemperatureSeries, slope_c_per_year: float, y_ref: int
) -> WeightedTemperatureSeries:
    """Shift every hour in year y by slope * (y_ref - y).

    Hours in the reference year are unchanged; a positive slope warms the
    past (and cools years beyond the reference).
    """
    slope = float(slope_c_per_year)
    if not np.isfinite(slope):
        raise InputDataError("trend slope must be finite")
    y_ref = int(check_in_range(y_ref, 1900, 2100, "reference year"))
    years = series.timestamps.year.to_numpy()
    return replace(series, values=series.values + slope * (y_ref - years))


@dataclass(frozen=True)
class WeatherProfile:
    """Seasonal + diurnal climatology for the synthetic generator."""

    mean_c: float = 18.0
    seasonal_amplitude_c: float = 10.0
    diurnal_amplitude_c: float = 4.0
    noise_sigma_c: float = 2.5
    noise_ar: float = 0.9
    lat_gradient_c_per_deg: float = -0.6
    floor_c: float | None = None


@dataclass(frozen=True)
class ColdSpell:
    """A cold spell forced into the synthetic field.

    ``depth_c`` is the target minimum temperature at the spell centre;
    ``start_hour`` is the 0-based hour-of-year offset within ``year``.
    """

    year: int
    start_hour: int
    depth_c: float
    length_h: int

    def __post_init__(self):
        if self.length_h < 1:
            raise InputDataError("cold spell length must be at least 1 hour")
        check_in_range(self.depth_c, TEMP_BOUNDS_C[0], TEMP_BOUNDS_C[1], "spell depth")


DEFAULT_GRID = Grid(lats=(27.0, 29.5, 32.0, 34.5), lons=(-103.0, -100.0, -97.0, -94.0))


def synth_weather(
    seed: int,
    years: int,
    profile: WeatherProfile | None = None,
    cold_spells: Sequence[ColdSpell] = (),
    start_year: int = 1950,
    grid: Grid | None = None,
) -> TemperatureField:
    """Generate a deterministic synthetic hourly temperature field.

    The baseline is a seasonal sinusoid (period 8760 h, minimum in
    mid-January) plus a diurnal cycle and AR(1) noise shared across cells,
    with a fixed north-south offset per latitude. Cold spells are blended
    in with a cosine taper so the field reaches the requested depth at the
    spell centre in every cell.

    The output is a pure function of (seed, years, profile, cold_spells,
    start_year, grid): the same arguments yield a bit-identical field.
    """
    if years < 1:
        raise InputDataError("need at least one simulated year")
    profile = profile or WeatherProfile()
    grid = grid or DEFAULT_GRID

    timestamps = pd.date_range(
        start=pd.Timestamp(year=start_year, month=1, day=1),
        end=pd.Timestamp(year=start_year + years, month=1, day=1),
        freq="h",
        inclusive="left",
    )
    n = len(timestamps)

    hoy = np.minimum(hour_of_year(timestamps), HOURS_PER_YEAR)
    seasonal = -profile.seasonal_amplitude_c * np.cos(
        2.0 * np.pi * (hoy - COLDEST_HOUR_OF_YEAR) / HOURS_PER_YEAR
    )
    diurnal = -profile.diurnal_amplitude_c * np.cos(
        2.0 * np.pi * (timestamps.hour.to_numpy() - COLDEST_HOUR_OF_DAY) / 24.0
    )

    rng = np.random.default_rng(seed)
    ar = profile.noise_ar
    innovations = rng.standard_normal(n) * profile.noise_sigma_c * np.sqrt(max(1.0 - ar**2, 0.0))
    noise = lfilter([1.0], [1.0, -ar], innovations)

    base = profile.mean_c + seasonal + diurnal + noise
    if profile.floor_c is not None:
        base = np.maximum(base, profile.floor_c)

    lat_offsets = (np.asarray(grid.lats) - np.mean(grid.lats)) * profile.lat_gradient_c_per_deg
    values = base[:, None, None] + lat_offsets[None, :, None] + np.zeros((1, 1, len(grid.lons)))

    t0 = timestamps[0]
    for spell in cold_spells:
        year_start = pd.Timestamp(year=spell.year, month=1, day=1)
        start = int((year_start - t0) / pd.Timedelta(hours=1)) + spell.start_hour
        end = start + spell.length_h
        if start < 0 or end > n:
            raise InputDataError(f"cold spell {spell} lies outside the simulated span")
        u = (np.arange(spell.length_h) + 0.5) / spell.length_h
        taper = 0.5 * (1.0 - np.cos(2.0 * np.pi * u))
        window = values[start:end]
        values[start:end] = window + taper[:, None, None] * (spell.depth_c - window)

    return TemperatureField(grid, values, timestamps)


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

def write_field_csv(field: TemperatureField, path) -> None:
    """Write a field in long format: timestamp, lat, lon, temp_c."""
    n_lat, n_lon = field.grid.shape
    n = len(field)
    lats = np.asarray(field.grid.lats)
    lons = np.asarray(field.grid.lons)
    df = pd.DataFrame(
        {
            "timestamp": np.repeat(field.timestamps, n_lat * n_lon),
            "lat": np.tile(np.repeat(lats, n_lon), n),
            "lon": np.tile(np.tile(lons, n_lat), n),
            "temp_c": field.values.reshape(-1),
        }
    )
    df.to_csv(path, index=False, date_format="%Y-%m-%dT%H:%M:%S", float_format="%.4f")


def read_field_csv(path, utc_offsets: Sequence[tuple[pd.Timestamp, float]] | None = None) -> TemperatureField:
    """Read a long-format gridded CSV back into a field.

    ``utc_offsets`` is an optional fixed-offset table, a sorted sequence of
    (effective-from timestamp, offset hours); when given, timestamps are
    treated as UTC and converted to local time by the offset in force.
    """
    df = pd.read_csv(path)
    check_columns(df, ("timestamp", "lat", "lon", "temp_c"), path)
    try:
        stamps = pd.to_datetime(df["timestamp"], format="ISO8601")
    except ValueError as exc:
        raise InputDataError(f"{path}: unparseable timestamp ({exc})") from exc

    if utc_offsets:
        stamps = apply_utc_offsets(pd.DatetimeIndex(stamps), utc_offsets)
        df = df.assign(timestamp=stamps)
    else:
        df = df.assign(timestamp=stamps)

    lats = tuple(sorted(df["lat"].unique()))
    lons = tuple(sorted(df["lon"].unique()))
    grid = Grid(lats, lons)
    times = pd.DatetimeIndex(sorted(df["timestamp"].unique()))

    pivot = df.pivot_table(index="timestamp", columns=["lat", "lon"], values="temp_c")
    if pivot.isna().any().any() or pivot.shape != (len(times), len(lats) * len(lons)):
        raise InputDataError(f"{path}: every cell needs a value for every timestamp")
    cols = pd.MultiIndex.from_product([lats, lons])
    values = pivot.reindex(index=times, columns=cols).to_numpy().reshape(
        len(times), len(lats), len(lons)
    )
    return TemperatureField(grid, values, times)


def apply_utc_offsets(timestamps: pd.DatetimeIndex, offsets) -> pd.DatetimeIndex:
    """Convert UTC timestamps to local time via a fixed-offset table."""
    table = sorted((pd.Timestamp(ts), float(hours)) for ts, hours in offsets)
    if not table:
        raise InputDataError("empty UTC offset table")
    cutoffs = pd.DatetimeIndex([ts for ts, _ in table]).asi8
    hours = np.array([h for _, h in table])
    pos = np.searchsorted(cutoffs, timestamps.asi8, side="right") - 1
    if np.any(pos < 0):
        raise InputDataError("timestamp precedes the first UTC offset entry")
    return timestamps + pd.to_timedelta(hours[pos], unit="h")


def read_sites_csv(path) -> pd.DataFrame:
    """Read a site list: lat, lon, weight, label."""
    df = pd.read_csv(path)
    check_columns(df, ("lat", "lon", "weight", "label"), path)
    if df.empty:
        raise InputDataError(f"{path}: site list is empty")
    return df


def site_maps_from_csv(path, grid: Grid, wind_split_lat: float | None = 30.0) -> dict[str, WeightMap]:
    """Build one weight map per site label; 'wind' splits north/south.

    Returns a dict keyed by basis label. A label named ``wind`` is split at
    ``wind_split_lat`` into ``wind-north`` and ``wind-south``.
    """
    df = read_sites_csv(path)
    maps: dict[str, WeightMap] = {}
    for label, group in df.groupby("label"):
        sites = list(zip(group["lat"], group["lon"], group["weight"]))
        if label == "wind" and wind_split_lat is not None:
            north, south = build_weight_map(sites, grid, region_split=wind_split_lat, label="wind")
            maps[north.label] = north
            maps[south.label] = south
        else:
            maps[str(label)] = build_weight_map(sites, grid, label=str(label))
    return maps


def write_series_csv(series: WeightedTemperatureSeries, path) -> None:
    pd.DataFrame({"timestamp": series.timestamps, "temp_c": series.values}).to_csv(
        path, index=False, date_format="%Y-%m-%dT%H:%M:%S", float_format="%.6f"
    )


def read_series_csv(path, basis: str = "unknown") -> WeightedTemperatureSeries:
    df = pd.read_csv(path)
    check_columns(df, ("timestamp", "temp_c"), path)
    try:
        stamps = pd.DatetimeIndex(pd.to_datetime(df["timestamp"], format="ISO8601"))
    except ValueError as exc:
        raise InputDataError(f"{path}: unparseable timestamp ({exc})") from exc
    return WeightedTemperatureSeries(df["temp_c"].to_numpy(dtype=float), stamps, basis)
