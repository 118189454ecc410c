import numpy as np
import pytest

from frostload import (
    FitError,
    InputDataError,
    OutageCurve,
    OutageModel,
    fit_outage_model,
    shift_thresholds,
    simulate_outages,
)
from frostload.outage import (
    OutageEpisode,
    load_outage_model,
    read_episode_csv,
    save_outage_model,
)
from frostload.weather import WeightedTemperatureSeries

from conftest import hourly_index


def gas_model(**overrides):
    params = dict(
        technology="gas",
        onset_temp_c=-8.8,
        plateau_gw=14.0,
        recovery_slope_gw_per_h=2.0,
        recovery_temp_c=0.0,
    )
    params.update(overrides)
    return OutageModel(**params)


def four_segment_episode(
    baseline_pre=2.0,
    plateau=12.0,
    slope=1.5,
    baseline_post=2.0,
    cold_start=20,
    cold_len=40,
    n=140,
    onset_temp=-6.0,
):
    """An episode that follows the 4-segment form exactly.

    The outage jumps at the first cold hour (temperature = onset), and the
    rest of the cold window is colder than the onset so that replaying the
    fitted model on the same temperatures re-triggers.
    """
    o = np.full(n, baseline_pre)
    t = np.full(n, 5.0)
    t[cold_start] = onset_temp
    t[cold_start + 1 : cold_start + cold_len] = onset_temp - 1.5
    level = baseline_pre + plateau
    o[cold_start : cold_start + cold_len] = level
    k = 1
    idx = cold_start + cold_len
    while idx < n and level - slope * k > baseline_post:
        o[idx] = level - slope * k
        idx += 1
        k += 1
    o[idx:] = baseline_post
    return OutageEpisode(o, t, "gas")


class TestFit:
    def test_four_segment_recovery(self):
        ep = four_segment_episode()
        m = fit_outage_model(ep)
        assert m.onset_temp_c == -6.0
        assert m.plateau_gw == pytest.approx(12.0, abs=1e-12)
        assert m.recovery_slope_gw_per_h == pytest.approx(1.5, rel=1e-9)
        assert m.baseline_pre_gw == 2.0
        assert m.baseline_post_gw == pytest.approx(2.0)

    def test_rectangle_area_identity(self):
        o = np.zeros(60)
        t = np.full(60, 5.0)
        t[10:40] = -3.0
        o[10:40] = 12.0
        m = fit_outage_model(OutageEpisode(o, t, "coal"))
        assert m.onset_temp_c == -3.0
        assert m.plateau_gw == pytest.approx(12.0, abs=1e-12)
        # flat post-recovery data: the drop is instantaneous
        assert m.recovery_slope_gw_per_h == pytest.approx(12.0)

    def test_tie_broken_to_earliest_hour(self):
        o = np.zeros(60)
        t = np.linspace(-5.0, -15.0, 60)
        t[40:] = 5.0
        o[10:40] = 8.0  # +8 jump at hour 10
        o[20:40] += 8.0  # +8 jump again at hour 20
        m = fit_outage_model(OutageEpisode(o, t, "gas"))
        assert m.onset_temp_c == t[10]

    def test_baseline_shift_invariance(self):
        ep = four_segment_episode()
        shifted = OutageEpisode(ep.outage_gw + 3.25, ep.temps_c, ep.technology)
        a = fit_outage_model(ep)
        b = fit_outage_model(shifted)
        assert b.onset_temp_c == a.onset_temp_c
        assert b.plateau_gw == pytest.approx(a.plateau_gw, abs=1e-12)
        assert b.recovery_slope_gw_per_h == pytest.approx(a.recovery_slope_gw_per_h, rel=1e-9)
        assert b.baseline_pre_gw == a.baseline_pre_gw + 3.25

    def test_warm_hours_in_first_ten_plateau_hours_ignored(self):
        ep = four_segment_episode()
        # a brief thaw 4 hours after onset must not end the plateau
        ep.temps_c[24] = 1.5
        m = fit_outage_model(ep)
        assert m.plateau_gw == pytest.approx(12.0, abs=1e-12)

    def test_monotone_flat_series_rejected(self):
        o = np.full(48, 5.0)
        t = np.full(48, -5.0)
        with pytest.raises(FitError, match="onset"):
            fit_outage_model(OutageEpisode(o, t, "gas"))

    def test_never_warm_rejected(self):
        o = np.zeros(48)
        o[10:] = 5.0
        t = np.full(48, -5.0)
        with pytest.raises(FitError, match="recovery"):
            fit_outage_model(OutageEpisode(o, t, "gas"))

    def test_short_episode_rejected(self):
        with pytest.raises(InputDataError):
            OutageEpisode(np.zeros(10), np.zeros(10), "gas")

    def test_refit_reproduces_episode_after_baseline_removal(self):
        ep = four_segment_episode(baseline_pre=1.0, baseline_post=1.0, slope=2.0)
        m = fit_outage_model(ep)
        replayed = simulate_outages(m, ep.temps_c)
        observed_net = ep.outage_gw - 1.0  # constant baselines removed
        # segment boundaries may differ by one hour; compare off-boundary hours
        diff_hours = np.flatnonzero(np.abs(replayed - observed_net) > 1e-9)
        boundaries = np.flatnonzero(np.abs(np.diff(observed_net)) > 1e-12)
        assert all(np.min(np.abs(h - boundaries)) <= 1 for h in diff_hours)


class TestSimulate:
    def test_always_warm_gives_zero(self):
        m = gas_model()
        assert simulate_outages(m, np.full(100, 5.0)).sum() == 0.0

    def test_minimum_window_and_decline(self):
        m = gas_model()
        temps = np.full(40, 5.0)
        temps[5:8] = -9.0
        out = simulate_outages(m, temps)
        np.testing.assert_array_equal(np.flatnonzero(out == 14.0), np.arange(5, 15))
        np.testing.assert_allclose(out[15:22], [12, 10, 8, 6, 4, 2, 0])

    def test_long_cold_full_duration(self):
        m = gas_model()
        temps = np.full(80, 5.0)
        temps[5:53] = -10.0
        out = simulate_outages(m, temps)
        assert np.all(out[5:53] == 14.0)
        assert out[53] == 12.0

    def test_retrigger_during_decline_restores_plateau(self):
        m = gas_model()
        temps = np.full(60, 5.0)
        temps[5:8] = -9.0
        temps[17] = -9.5  # during the decline
        out = simulate_outages(m, temps)
        np.testing.assert_allclose(out[15:17], [12.0, 10.0])  # decline under way
        assert np.all(out[17:27] == 14.0)  # plateau restored, fresh 10-hour window
        np.testing.assert_allclose(out[27:34], [12, 10, 8, 6, 4, 2, 0])

    def test_outage_bounded_by_plateau(self):
        m = gas_model()
        rng = np.random.default_rng(0)
        temps = rng.uniform(-15, 10, 5000)
        out = simulate_outages(m, temps)
        assert out.min() >= 0.0
        assert out.max() <= m.plateau_gw

    def test_energy_monotone_in_onset_temperature(self):
        rng = np.random.default_rng(1)
        temps = np.cumsum(rng.normal(0, 1.5, 4000)) * 0.4 + 2.0
        totals = []
        for onset in (-12.0, -9.0, -6.0, -3.0):
            m = gas_model(onset_temp_c=onset)
            totals.append(simulate_outages(m, temps).sum())
        assert all(a <= b + 1e-9 for a, b in zip(totals, totals[1:]))

    def test_accepts_weighted_series(self):
        ts = hourly_index("2021-02-01", 50)
        series = WeightedTemperatureSeries(np.full(50, -10.0), ts, "gas")
        out = simulate_outages(gas_model(), series)
        assert np.all(out == 14.0)


class TestShiftThresholds:
    def test_zero_shift_identity(self):
        m = gas_model()
        assert shift_thresholds(m, 0.0, 0.0) == m

    def test_warming_shift(self):
        m = shift_thresholds(gas_model(), 3.0)
        assert m.onset_temp_c == pytest.approx(-5.8)

    def test_cooling_shift(self):
        m = shift_thresholds(gas_model(), -3.0)
        assert m.onset_temp_c == pytest.approx(-11.8)

    def test_ordering_violation_rejected(self):
        with pytest.raises(InputDataError):
            shift_thresholds(gas_model(), 10.0, 0.0)


class TestEstimator:
    def test_fit_predict_round_trip(self):
        ep = four_segment_episode(baseline_pre=0.0, baseline_post=0.0)
        curve = OutageCurve(technology="gas").fit(ep.temps_c, ep.outage_gw)
        assert curve.model_.plateau_gw == pytest.approx(12.0, abs=1e-12)
        replay = curve.predict(ep.temps_c)
        assert replay.max() == pytest.approx(12.0)

    def test_sklearn_get_params(self):
        curve = OutageCurve(technology="coal", recovery_temp_c=1.0)
        params = curve.get_params()
        assert params == {"technology": "coal", "recovery_temp_c": 1.0}
        curve.set_params(recovery_temp_c=0.5)
        assert curve.recovery_temp_c == 0.5


class TestPersistence:
    def test_round_trip(self, tmp_path):
        m = gas_model(baseline_pre_gw=1.5, baseline_post_gw=0.5)
        path = tmp_path / "gas.txt"
        save_outage_model(m, path)
        assert load_outage_model(path) == m

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "broken.txt"
        path.write_text("technology = gas\nonset_temp_c = -8.8\n")
        with pytest.raises(InputDataError):
            load_outage_model(path)


class TestEpisodeCsv:
    def test_read_aligns_with_series(self, tmp_path):
        ts = hourly_index("2021-02-14", 48)
        series = WeightedTemperatureSeries(np.linspace(2, -12, 48), ts, "gas")
        lines = ["timestamp,tech,outage_gw"]
        for i in range(24, 48):
            lines.append(f"{ts[i].isoformat()},gas,{5.0 + i}")
            lines.append(f"{ts[i].isoformat()},coal,1.0")
        path = tmp_path / "episodes.csv"
        path.write_text("\n".join(lines) + "\n")
        ep = read_episode_csv(path, series, "gas")
        assert len(ep.outage_gw) == 24
        np.testing.assert_array_equal(ep.temps_c, series.values[24:48])

    def test_unknown_tech_rejected(self, tmp_path):
        ts = hourly_index("2021-02-14", 30)
        series = WeightedTemperatureSeries(np.zeros(30), ts, "gas")
        path = tmp_path / "episodes.csv"
        path.write_text("timestamp,tech,outage_gw\n2021-02-14T00:00:00,coal,1.0\n")
        with pytest.raises(InputDataError):
            read_episode_csv(path, series, "gas")


class TestModelInvariants:
    def test_invalid_parameters_rejected(self):
        with pytest.raises(InputDataError):
            gas_model(plateau_gw=-1.0)
        with pytest.raises(InputDataError):
            gas_model(recovery_slope_gw_per_h=0.0)
        with pytest.raises(InputDataError):
            gas_model(onset_temp_c=2.0)  # above recovery
        with pytest.raises(InputDataError):
            gas_model(min_full_hours=0)
