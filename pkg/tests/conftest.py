"""Shared fixtures: synthetic weather chains and helper builders."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pandas as pd
import pytest

from frostload import (
    ColdSpell,
    OutageModel,
    SystemConfig,
    TemperatureLoadModel,
    build_weight_map,
    run_years,
    synth_weather,
    weighted_index,
)
from frostload.calendars import winter_mask
from frostload.deficit import WindGenerationSeries
from frostload.load import N_DESIGN_COLUMNS, build_design

POP_SITES = [(29.7, -95.4, 2.3), (32.8, -96.8, 1.3), (29.4, -98.5, 1.5)]
GAS_SITES = [(29.9, -95.3, 5.0), (32.3, -97.0, 4.0)]
COAL_SITES = [(32.4, -97.5, 2.0), (29.5, -96.1, 1.5)]
WIND_SITES = [(34.2, -101.7, 3.0), (27.5, -97.5, 1.5)]

DEFAULT_MODELS = {
    "gas": dict(onset_temp_c=-8.8, plateau_gw=20.1, recovery_slope_gw_per_h=1.8),
    "coal": dict(onset_temp_c=-10.2, plateau_gw=4.5, recovery_slope_gw_per_h=1.2),
    "wind-north": dict(onset_temp_c=-1.2, plateau_gw=7.0, recovery_slope_gw_per_h=2.5),
    "wind-south": dict(onset_temp_c=-3.1, plateau_gw=6.0, recovery_slope_gw_per_h=2.5),
}


def holiday_calendar(first_year: int, last_year: int) -> frozenset[dt.date]:
    days = set()
    for y in range(first_year, last_year + 1):
        days.add(dt.date(y, 12, 25))
        days.add(dt.date(y, 1, 1))
    return frozenset(days)


def weighted_inputs(field):
    """Per-basis weighted series for the standard site layout."""
    grid = field.grid
    temps = {
        "population": weighted_index(field, build_weight_map(POP_SITES, grid, label="population")),
        "gas": weighted_index(field, build_weight_map(GAS_SITES, grid, label="gas")),
        "coal": weighted_index(field, build_weight_map(COAL_SITES, grid, label="coal")),
    }
    north, south = build_weight_map(WIND_SITES, grid, region_split=30.0, label="wind")
    temps["wind-north"] = weighted_index(field, north)
    temps["wind-south"] = weighted_index(field, south)
    return temps


def demand_coefficients(intercept: float = 42.0) -> np.ndarray:
    """A fixed, plausible coefficient vector for generating synthetic load."""
    rng = np.random.default_rng(5)
    beta = np.zeros(N_DESIGN_COLUMNS)
    beta[0] = intercept
    beta[1:7] = rng.uniform(0.5, 2.0, 6)
    beta[7:30] = rng.uniform(-1.5, 3.0, 23)
    beta[30] = -2.0
    beta[31], beta[32] = 1.2, 2.5
    beta[33] = -0.55
    beta[34] = 3.0e-5
    return beta


def fit_demand_model(field, temps, holidays, noise_sigma: float = 1.2) -> TemperatureLoadModel:
    """Fit the demand model on load generated from the fixed coefficients."""
    ts = field.timestamps
    mask = winter_mask(ts) & (ts.year >= ts.year.max() - 2)
    X = build_design(ts[mask], temps["population"].values[mask], holidays)
    rng = np.random.default_rng(7)
    load = X @ demand_coefficients() + rng.normal(0.0, noise_sigma, X.shape[0])
    return TemperatureLoadModel(label="synthetic").fit(X, load)


def system_config(c_wind_gw: float = 30.0) -> SystemConfig:
    models = {
        tech: OutageModel(technology=tech, **params)
        for tech, params in DEFAULT_MODELS.items()
    }
    return SystemConfig(c_wind_gw=c_wind_gw, outage_models=models)


@pytest.fixture(scope="session")
def chain71():
    """A 71-year synthetic run with three injected spells (two deficit-deep)."""
    spells = [
        ColdSpell(1963, 400, -11.0, 60),
        ColdSpell(1989, 900, -13.0, 90),
        ColdSpell(2020, 8200, -15.0, 120),
    ]
    field = synth_weather(seed=42, years=71, cold_spells=spells)
    temps = weighted_inputs(field)
    holidays = holiday_calendar(1950, 2022)
    load_model = fit_demand_model(field, temps, holidays)
    cfg = system_config()
    wind = WindGenerationSeries(
        np.full(len(field.timestamps), 0.35 * cfg.c_wind_gw), field.timestamps
    )
    series = run_years(cfg, temps, load_model, wind, holidays=holidays)
    return {
        "field": field,
        "temps": temps,
        "holidays": holidays,
        "load_model": load_model,
        "cfg": cfg,
        "wind": wind,
        "series": series,
    }


@pytest.fixture(scope="session")
def chain10():
    """A compact 10-year scenario for sweeps and paired-bootstrap checks."""
    spells = [
        ColdSpell(1952, 700, -12.0, 80),
        ColdSpell(1955, 1200, -14.0, 100),
        ColdSpell(1958, 300, -10.5, 50),
    ]
    field = synth_weather(seed=9, years=10, cold_spells=spells)
    temps = weighted_inputs(field)
    holidays = holiday_calendar(1950, 1961)
    load_model = fit_demand_model(field, temps, holidays)
    cfg = system_config()
    wind = WindGenerationSeries(
        np.full(len(field.timestamps), 0.35 * cfg.c_wind_gw), field.timestamps
    )
    return {
        "field": field,
        "temps": temps,
        "holidays": holidays,
        "load_model": load_model,
        "cfg": cfg,
        "wind": wind,
    }


def hourly_index(start: str, hours: int) -> pd.DatetimeIndex:
    return pd.date_range(start, periods=hours, freq="h")
