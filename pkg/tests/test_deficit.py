import numpy as np
import pandas as pd
import pytest

from frostload import (
    InputDataError,
    OutageModel,
    SystemConfig,
    Winterization,
    apply_winterization,
    available_capacity,
    capacity_deficit,
    extract_events,
    run_years,
    sensitivity_sweep,
)
from frostload.deficit import WindGenerationSeries

from conftest import hourly_index, system_config


def make_cfg(**kwargs):
    return system_config(**kwargs)


class TestAvailableCapacity:
    def test_no_outages_adds_wind(self):
        cfg = make_cfg()
        c = available_capacity(cfg, {}, np.full(4, 10.0))
        np.testing.assert_allclose(c, 72.0)

    def test_mixed_outages(self):
        cfg = make_cfg()
        outages = {
            "gas": np.array([20.0]),
            "coal": np.array([5.0]),
            "wind-north": np.array([15.0]),
        }
        c = available_capacity(cfg, outages, np.array([10.0]))
        np.testing.assert_allclose(c, 42.0)  # 62 - 20 - 5 + 10 * 15/30

    def test_full_wind_outage_drops_wind_term(self):
        cfg = make_cfg()
        outages = {
            "gas": np.array([3.0]),
            "coal": np.array([1.0]),
            "wind-north": np.array([20.0]),
            "wind-south": np.array([10.0]),
        }
        c = available_capacity(cfg, outages, np.array([12.0]))
        np.testing.assert_allclose(c, 62.0 - 4.0)

    def test_wind_outage_above_capacity_rejected(self):
        cfg = make_cfg()
        with pytest.raises(InputDataError):
            available_capacity(cfg, {"wind-north": np.array([40.0])}, np.array([5.0]))

    def test_misaligned_series_rejected(self):
        cfg = make_cfg()
        with pytest.raises(InputDataError):
            available_capacity(cfg, {"gas": np.zeros(3)}, np.zeros(4))


class TestCapacityDeficit:
    def test_equal_series_zero_deficit(self):
        ts = hourly_index("2021-02-01", 5)
        series = capacity_deficit(np.full(5, 50.0), np.full(5, 50.0), ts)
        assert series.lost_load_gw.sum() == 0.0
        assert all(v == 0.0 for v in series.annual_totals().values())

    def test_single_deficit_hour(self):
        ts = hourly_index("2021-02-01", 1)
        series = capacity_deficit([70.0], [46.0], ts)
        assert series.deficit_gw[0] == 24.0
        assert series.annual_totals() == {2021: 24.0}

    def test_mixed_signs_totals(self):
        ts = hourly_index("2021-02-01", 4)
        series = capacity_deficit([47.0, 55.0, 49.0, 52.0], [50.0] * 4, ts)
        assert series.annual_totals() == {2021: 7.0}

    def test_lost_load_is_clipped_deficit(self):
        rng = np.random.default_rng(0)
        ts = hourly_index("2021-01-01", 200)
        d = rng.normal(0, 5, 200)
        series = capacity_deficit(d + 50.0, np.full(200, 50.0), ts)
        np.testing.assert_array_equal(series.lost_load_gw, np.maximum(series.deficit_gw, 0.0))

    def test_december_counts_toward_next_year(self):
        ts = hourly_index("2020-12-31 22:00", 4)  # two hours in Dec, two in Jan
        series = capacity_deficit([51.0] * 4, [50.0] * 4, ts)
        assert series.annual_totals() == {2021: 4.0}


class TestWinterization:
    def test_zero_winterization_is_identity(self):
        cfg = make_cfg()
        out = apply_winterization(cfg, Winterization("gas", 0.0))
        assert out.outage_models["gas"] == cfg.outage_models["gas"]

    def test_plateau_reduced(self):
        cfg = make_cfg()
        out = apply_winterization(cfg, Winterization("gas", 5.0))
        assert out.outage_models["gas"].plateau_gw == pytest.approx(20.1 - 5.0)
        # original untouched
        assert cfg.outage_models["gas"].plateau_gw == 20.1

    def test_excess_clamps_to_zero(self):
        cfg = make_cfg()
        out = apply_winterization(cfg, Winterization("coal", 99.0))
        assert out.outage_models["coal"].plateau_gw == 0.0

    def test_unknown_technology_rejected(self):
        with pytest.raises(InputDataError):
            apply_winterization(make_cfg(), Winterization("nuclear", 1.0))


class TestRunYears:
    def test_warm_years_have_zero_totals(self, chain10):
        # no spells at all: a field with a floor above every onset
        from frostload import synth_weather, WeatherProfile
        from conftest import weighted_inputs

        field = synth_weather(
            seed=3, years=2, profile=WeatherProfile(floor_c=2.0, lat_gradient_c_per_deg=0.0)
        )
        temps = weighted_inputs(field)
        wind = WindGenerationSeries(np.full(len(field.timestamps), 10.0), field.timestamps)
        series = run_years(
            make_cfg(), temps, chain10["load_model"], wind, holidays=chain10["holidays"]
        )
        assert series.lost_load_gw.sum() == 0.0
        assert all(v == 0.0 for v in series.annual_totals().values())

    def test_single_spell_single_deficit_year(self, chain10):
        series = run_years(
            chain10["cfg"],
            chain10["temps"],
            chain10["load_model"],
            chain10["wind"],
            holidays=chain10["holidays"],
        )
        totals = series.annual_totals()
        deep_years = {y for y, v in totals.items() if v > 0}
        # spells were injected in 1952, 1955, 1958 (depths -12, -14, -10.5)
        assert deep_years <= {1952, 1955, 1958}
        assert 1955 in deep_years

    def test_deterministic(self, chain10):
        args = (
            chain10["cfg"],
            chain10["temps"],
            chain10["load_model"],
            chain10["wind"],
        )
        a = run_years(*args, holidays=chain10["holidays"])
        b = run_years(*args, holidays=chain10["holidays"])
        np.testing.assert_array_equal(a.deficit_gw, b.deficit_gw)

    def test_non_winter_hours_zero_deficit(self, chain10):
        series = run_years(
            chain10["cfg"],
            chain10["temps"],
            chain10["load_model"],
            chain10["wind"],
            holidays=chain10["holidays"],
        )
        months = series.timestamps.month
        off_winter = ~np.isin(months, (12, 1, 2))
        assert np.all(series.deficit_gw[off_winter] == 0.0)

    def test_winterization_never_increases_deficit(self, chain10):
        base = run_years(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            holidays=chain10["holidays"],
        )
        for w in (1.0, 5.0, 20.1):
            wint = run_years(
                chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
                holidays=chain10["holidays"],
                winterization=Winterization("gas", w),
            )
            assert np.all(wint.lost_load_gw <= base.lost_load_gw + 1e-12)

    def test_missing_basis_rejected(self, chain10):
        temps = {k: v for k, v in chain10["temps"].items() if k != "population"}
        with pytest.raises(InputDataError):
            run_years(chain10["cfg"], temps, chain10["load_model"], chain10["wind"])

    def test_annual_totals_match_event_severities(self, chain10):
        series = run_years(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            holidays=chain10["holidays"],
        )
        events = extract_events(series.deficit_gw, series.timestamps, 0.0, "above", 24)
        by_year: dict[int, float] = {}
        for ev in events:
            by_year[ev.year] = by_year.get(ev.year, 0.0) + ev.severity
        for year, total in series.annual_totals().items():
            assert by_year.get(year, 0.0) == pytest.approx(total, abs=1e-9)


class TestSensitivitySweep:
    def test_zero_point_matches_baseline(self, chain10):
        base = run_years(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            holidays=chain10["holidays"],
        )
        table = sensitivity_sweep(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            deltas_onset=[0.0], deltas_recovery=[0.0], scope="all",
            holidays=chain10["holidays"],
        )
        assert len(table) == 1
        assert table["total_lost_load_gwh"].iloc[0] == base.lost_load_gw.sum()

    def test_monotone_in_onset_shift(self, chain10):
        # recovery shifted +3 so a +3 onset shift keeps every model valid
        table = sensitivity_sweep(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            deltas_onset=[-3.0, 0.0, 3.0], deltas_recovery=[3.0], scope="all",
            holidays=chain10["holidays"],
        )
        totals = table.sort_values("delta_onset_c")["total_lost_load_gwh"].to_numpy()
        assert totals[0] <= totals[1] + 1e-9 <= totals[2] + 2e-9

    def test_gas_scope_leaves_other_models(self, chain10):
        gas_only = sensitivity_sweep(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            deltas_onset=[3.0], deltas_recovery=[3.0], scope="gas",
            holidays=chain10["holidays"],
        )
        all_techs = sensitivity_sweep(
            chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
            deltas_onset=[3.0], deltas_recovery=[3.0], scope="all",
            holidays=chain10["holidays"],
        )
        assert (
            gas_only["total_lost_load_gwh"].iloc[0]
            <= all_techs["total_lost_load_gwh"].iloc[0] + 1e-9
        )

    def test_invalid_shift_propagates(self, chain10):
        # +3 onset with unshifted recovery breaks wind-north ordering
        with pytest.raises(InputDataError):
            sensitivity_sweep(
                chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
                deltas_onset=[3.0], deltas_recovery=[0.0], scope="all",
                holidays=chain10["holidays"],
            )

    def test_bad_scope_rejected(self, chain10):
        with pytest.raises(InputDataError):
            sensitivity_sweep(
                chain10["cfg"], chain10["temps"], chain10["load_model"], chain10["wind"],
                deltas_onset=[0.0], deltas_recovery=[0.0], scope="wind",
            )


class TestSystemConfig:
    def test_invalid_capacity_rejected(self):
        with pytest.raises(InputDataError):
            SystemConfig(c_wind_gw=-1.0, outage_models={})

    def test_technology_classification(self):
        cfg = make_cfg()
        assert set(cfg.wind_technologies()) == {"wind-north", "wind-south"}
        assert set(cfg.thermal_technologies()) == {"gas", "coal"}


def test_wind_series_validation():
    ts = hourly_index("2021-01-01", 3)
    with pytest.raises(InputDataError):
        WindGenerationSeries(np.array([-1.0, 0.0, 1.0]), ts)
