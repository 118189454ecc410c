"""Hourly capacity deficits and annual loss-of-load totals.

Available capacity is fixed thermal capacity minus simulated gas and coal
outages, plus wind generation derated by the share of wind capacity in
outage. The hourly deficit is demand minus available capacity; positive
hours are lost load, summed per winter season into annual totals. Winter
seasons are labelled by the year containing January/February, so December
belongs to the following event-year.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .calendars import event_year, winter_mask
from .load import TemperatureLoadModel, build_design
from .outage import OutageModel, shift_thresholds, simulate_outages
from .validation import (
    InputDataError,
    as_float_array,
    check_aligned_timestamps,
    check_hourly,
)
from .weather import WeightedTemperatureSeries

# Temperature basis that drives the demand model.
DEMAND_BASIS = "population"

WIND_PREFIX = "wind"


@dataclass
class SystemConfig:
    """Capacities, value of lost load, and per-technology outage models."""

    c_wind_gw: float
    outage_models: dict[str, OutageModel]
    c_thermal_gw: float = 62.0
    voll_usd_per_mwh: float = 9000.0

    def __post_init__(self):
        if self.c_thermal_gw <= 0 or self.c_wind_gw <= 0:
            raise InputDataError("capacities must be positive")
        if self.voll_usd_per_mwh <= 0:
            raise InputDataError("value of lost load must be positive")

    def wind_technologies(self) -> list[str]:
        return [t for t in self.outage_models if t.startswith(WIND_PREFIX)]

    def thermal_technologies(self) -> list[str]:
        return [t for t in self.outage_models if not t.startswith(WIND_PREFIX)]


@dataclass
class WindGenerationSeries:
    """Hourly wind generation at full availability, GW."""

    values: np.ndarray
    timestamps: pd.DatetimeIndex

    def __post_init__(self):
        self.timestamps = check_hourly(self.timestamps, "wind timestamps")
        self.values = as_float_array(self.values, "wind generation")
        if len(self.values) != len(self.timestamps):
            raise InputDataError("wind values and timestamps differ in length")
        if np.any(self.values < 0):
            raise InputDataError("wind generation must be non-negative")


@dataclass
class Winterization:
    """Winterized capacity (GW) for one technology."""

    technology: str
    capacity_gw: float

    def __post_init__(self):
        if self.capacity_gw < 0:
            raise InputDataError("winterized capacity must be non-negative")


@dataclass
class DeficitSeries:
    """Hourly capacity deficit (signed) and derived lost load."""

    timestamps: pd.DatetimeIndex
    deficit_gw: np.ndarray
    lost_load_gw: np.ndarray

    def annual_summary(self) -> pd.DataFrame:
        """Per event-year totals: year, total_deficit_gwh, peak_deficit_gw, deficit_hours.

        Every event-year present in the series appears, including years
        with zero lost load (the bootstrap samples from the full set).
        """
        years = event_year(self.timestamps)
        df = pd.DataFrame(
            {
                "year": years,
                "lost": self.lost_load_gw,
                "positive": (self.deficit_gw > 0).astype(int),
            }
        )
        g = df.groupby("year").agg(
            total_deficit_gwh=("lost", "sum"),
            peak_deficit_gw=("lost", "max"),
            deficit_hours=("positive", "sum"),
        )
        return g.reset_index()

    def annual_totals(self) -> dict[int, float]:
        """Event-year -> total lost load, GWh."""
        summary = self.annual_summary()
        return dict(zip(summary["year"], summary["total_deficit_gwh"]))


def available_capacity(
    cfg: SystemConfig, outages: Mapping[str, np.ndarray], wind_gw: np.ndarray
) -> np.ndarray:
    """Hourly available capacity from thermal capacity, outages, and wind.

    Thermal outages subtract directly; wind generation is scaled by the
    share of wind capacity still available.
    """
    wind_gw = as_float_array(wind_gw, "wind generation")
    n = len(wind_gw)
    thermal_out = np.zeros(n)
    wind_out = np.zeros(n)
    for tech, series in outages.items():
        series = as_float_array(series, f"{tech} outages")
        if len(series) != n:
            raise InputDataError(f"{tech} outage series is misaligned")
        if tech.startswith(WIND_PREFIX):
            wind_out = wind_out + series
        else:
            thermal_out = thermal_out + series
    if np.any(wind_out > cfg.c_wind_gw + 1e-9):
        raise InputDataError("wind outages exceed installed wind capacity")
    if np.any(wind_gw > cfg.c_wind_gw + 1e-9):
        raise InputDataError("wind generation exceeds installed wind capacity")
    return (
        cfg.c_thermal_gw
        - thermal_out
        + wind_gw * (cfg.c_wind_gw - wind_out) / cfg.c_wind_gw
    )


def capacity_deficit(demand_gw, capacity_gw, timestamps) -> DeficitSeries:
    """Hourly deficit = demand - capacity; positive hours are lost load."""
    demand_gw = as_float_array(demand_gw, "demand")
    capacity_gw = as_float_array(capacity_gw, "capacity")
    timestamps = check_hourly(timestamps)
    if not (len(demand_gw) == len(capacity_gw) == len(timestamps)):
        raise InputDataError("demand, capacity, and timestamps are misaligned")
    d = demand_gw - capacity_gw
    return DeficitSeries(timestamps, d, np.maximum(d, 0.0))


def apply_winterization(
    cfg: SystemConfig, scenario: Winterization | Sequence[Winterization] | None
) -> SystemConfig:
    """Copy of the config with plateau levels reduced by winterized capacity.

    Reductions clamp at zero (full winterization); unknown technologies
    are an error.
    """
    if scenario is None:
        return cfg
    if isinstance(scenario, Winterization):
        scenario = [scenario]
    models = dict(cfg.outage_models)
    for item in scenario:
        if item.technology not in models:
            raise InputDataError(f"unknown technology '{item.technology}'")
        model = models[item.technology]
        models[item.technology] = replace(
            model, plateau_gw=max(model.plateau_gw - item.capacity_gw, 0.0)
        )
    return replace(cfg, outage_models=models)


def run_years(
    cfg: SystemConfig,
    temps: Mapping[str, WeightedTemperatureSeries],
    load_model: TemperatureLoadModel,
    wind: WindGenerationSeries,
    holidays=frozenset(),
    winterization: Winterization | Sequence[Winterization] | None = None,
) -> DeficitSeries:
    """Simulate the full deficit chain over the supplied span.

    ``temps`` maps basis labels to weighted series and must cover the
    demand basis plus one series per configured outage technology, all on
    identical timestamps. Demand is predicted for winter hours only;
    non-winter hours carry zero deficit by definition. Deterministic: the
    same inputs produce bit-identical output.
    """
    if DEMAND_BASIS not in temps:
        raise InputDataError(f"temperature series for basis '{DEMAND_BASIS}' is required")
    reference = temps[DEMAND_BASIS]
    for tech in cfg.outage_models:
        if tech not in temps:
            raise InputDataError(f"temperature series for technology '{tech}' is required")
    for label, series in temps.items():
        check_aligned_timestamps(series.timestamps, reference.timestamps, f"'{label}'")
    check_aligned_timestamps(wind.timestamps, reference.timestamps, "wind")

    cfg = apply_winterization(cfg, winterization)
    outages = {
        tech: simulate_outages(model, temps[tech])
        for tech, model in cfg.outage_models.items()
    }
    capacity = available_capacity(cfg, outages, wind.values)

    ts = reference.timestamps
    wm = winter_mask(ts)
    demand = np.zeros(len(ts))
    if wm.any():
        X = build_design(ts[wm], reference.values[wm], holidays)
        demand[wm] = load_model.predict(X)

    d = np.where(wm, demand - capacity, 0.0)
    return DeficitSeries(ts, d, np.maximum(d, 0.0))


def sensitivity_sweep(
    cfg: SystemConfig,
    temps: Mapping[str, WeightedTemperatureSeries],
    load_model: TemperatureLoadModel,
    wind: WindGenerationSeries,
    deltas_onset: Sequence[float],
    deltas_recovery: Sequence[float],
    scope: str = "all",
    holidays=frozenset(),
) -> pd.DataFrame:
    """Total lost load per (onset shift, recovery shift) grid point.

    ``scope`` selects the shifted technologies: ``"gas"`` shifts only the
    gas model, ``"all"`` shifts every technology.
    """
    if scope not in ("gas", "all"):
        raise InputDataError(f"scope must be 'gas' or 'all', got '{scope}'")
    rows = []
    for d_on in sorted(deltas_onset):
        for d_rec in sorted(deltas_recovery):
            models = {}
            for tech, model in cfg.outage_models.items():
                if scope == "all" or tech == "gas":
                    models[tech] = shift_thresholds(model, d_on, d_rec)
                else:
                    models[tech] = model
            shifted = replace(cfg, outage_models=models)
            series = run_years(shifted, temps, load_model, wind, holidays)
            rows.append(
                {
                    "delta_onset_c": d_on,
                    "delta_recovery_c": d_rec,
                    "total_lost_load_gwh": float(series.lost_load_gw.sum()),
                }
            )
    return pd.DataFrame(rows)
