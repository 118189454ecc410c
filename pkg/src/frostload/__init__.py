"""Cold-spell loss-of-load simulation and winterization economics.

The pipeline chains weighted temperature indices, a temperature-dependent
winter demand regression, temperature-triggered outage models, hourly
capacity deficits, run-pooled event statistics with GEV return periods,
and a bootstrapped discounted cost-benefit of winterization.
"""

from .deficit import (
    DeficitSeries,
    SystemConfig,
    WindGenerationSeries,
    Winterization,
    apply_winterization,
    available_capacity,
    capacity_deficit,
    run_years,
    sensitivity_sweep,
)
from .economics import (
    AvoidedLoss,
    CostModel,
    LossDistribution,
    annuity_factor,
    avoided_loss,
    bootstrap_losses,
    marginal_curve,
    profitable_capacity,
    winterization_costs,
)
from .events import (
    DeficitEvent,
    GevFit,
    TrendResult,
    annual_series,
    extract_events,
    fit_gev,
    mean_temp_trend,
    return_period,
    theil_sen_slope,
    threshold_trend_table,
    trend_test,
)
from .load import TemperatureLoadModel, build_design, load_load_model, save_load_model
from .outage import (
    OutageCurve,
    OutageEpisode,
    OutageModel,
    fit_outage_model,
    load_outage_model,
    save_outage_model,
    shift_thresholds,
    simulate_outages,
)
from .validation import FitError, InputDataError
from .weather import (
    ColdSpell,
    Grid,
    TemperatureField,
    WeatherProfile,
    WeightMap,
    WeightedTemperatureSeries,
    apply_trend,
    build_weight_map,
    synth_weather,
    weighted_index,
)

__version__ = "0.1.0"

__all__ = [
    "AvoidedLoss",
    "ColdSpell",
    "CostModel",
    "DeficitEvent",
    "DeficitSeries",
    "FitError",
    "GevFit",
    "Grid",
    "InputDataError",
    "LossDistribution",
    "OutageCurve",
    "OutageEpisode",
    "OutageModel",
    "SystemConfig",
    "TemperatureField",
    "TemperatureLoadModel",
    "TrendResult",
    "WeatherProfile",
    "WeightMap",
    "WeightedTemperatureSeries",
    "WindGenerationSeries",
    "Winterization",
    "annual_series",
    "annuity_factor",
    "apply_trend",
    "apply_winterization",
    "available_capacity",
    "avoided_loss",
    "bootstrap_losses",
    "build_design",
    "build_weight_map",
    "capacity_deficit",
    "extract_events",
    "fit_gev",
    "fit_outage_model",
    "load_load_model",
    "load_outage_model",
    "marginal_curve",
    "mean_temp_trend",
    "profitable_capacity",
    "return_period",
    "run_years",
    "save_load_model",
    "save_outage_model",
    "sensitivity_sweep",
    "shift_thresholds",
    "simulate_outages",
    "synth_weather",
    "theil_sen_slope",
    "threshold_trend_table",
    "trend_test",
    "weighted_index",
    "winterization_costs",
]
