"""Temperature-triggered generation outage models.

An observed outage episode is approximated by four segments: a constant
pre-failure baseline, a constant plateau during critical failure, a linear
recovery decline, and a constant tail. The fitted parameters (onset
temperature, plateau level, recovery slope) are then replayed over
arbitrary temperature series: capacity trips to the plateau whenever the
technology-weighted temperature falls below the onset, stays tripped until
the temperature exceeds the recovery threshold and a minimum duration has
passed, and then ramps down linearly. Constant baselines are removed for
simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator

from .validation import FitError, InputDataError, as_float_array, check_columns
from .weather import WeightedTemperatureSeries

# Hours right after the plateau starts during which warm readings are
# ignored when locating the recovery point, and the minimum full-outage
# duration used in simulation.
RECOVERY_EXCLUSION_H = 10
TAIL_POINTS = 10


@dataclass
class OutageModel:
    """Fitted 4-segment outage parameters for one technology."""

    technology: str
    onset_temp_c: float
    plateau_gw: float
    recovery_slope_gw_per_h: float
    recovery_temp_c: float = 0.0
    min_full_hours: int = RECOVERY_EXCLUSION_H
    baseline_pre_gw: float = 0.0
    baseline_post_gw: float = 0.0

    def __post_init__(self):
        if self.plateau_gw < 0:
            raise InputDataError("plateau must be non-negative")
        if self.recovery_slope_gw_per_h <= 0:
            raise InputDataError("recovery slope must be positive")
        if not self.onset_temp_c < self.recovery_temp_c:
            raise InputDataError(
                f"onset temperature ({self.onset_temp_c}) must be below "
                f"recovery temperature ({self.recovery_temp_c})"
            )
        if self.min_full_hours < 1:
            raise InputDataError("minimum full-outage duration must be at least 1 hour")


@dataclass
class OutageEpisode:
    """Observed hourly outages aligned with the plant-weighted temperature."""

    outage_gw: np.ndarray
    temps_c: np.ndarray
    technology: str
    timestamps: pd.DatetimeIndex | None = None

    def __post_init__(self):
        self.outage_gw = as_float_array(self.outage_gw, "outage series")
        self.temps_c = as_float_array(self.temps_c, "temperature series")
        if len(self.outage_gw) != len(self.temps_c):
            raise InputDataError("outage and temperature series differ in length")
        if np.any(self.outage_gw < 0):
            raise InputDataError("outages must be non-negative")
        if len(self.outage_gw) < 24:
            raise InputDataError("episode must cover at least 24 hours")


def fit_outage_model(episode: OutageEpisode, recovery_temp_c: float = 0.0) -> OutageModel:
    """Estimate 4-segment outage parameters from an observed episode.

    Segment boundaries and levels:

    * onset: the hour of the single largest hour-over-hour outage increase
      (ties broken to the earliest); the onset temperature is the weighted
      temperature at that hour.
    * plateau: the level that equates the modelled and observed outage area
      over the plateau span (onset to recovery), net of the pre-onset
      baseline (the first observation).
    * recovery point: first hour after the plateau started with temperature
      above ``recovery_temp_c``, ignoring such hours within the first
      10 hours of the plateau.
    * recovery slope: from a two-piece least-squares fit (declining line,
      then a constant fixed to the mean of the final ten observations) over
      the post-recovery data, with the breakpoint chosen by grid search.
      If the best fit does not decline (an instantaneous drop, e.g. a
      rectangular episode), the slope is set to the plateau level so the
      drop completes within one hour.
    """
    o = episode.outage_gw
    t = episode.temps_c
    n = len(o)

    diffs = o[1:] - o[:-1]
    if diffs.size == 0 or diffs.max() <= 0:
        raise FitError("outage series has no hour-over-hour increase; cannot locate onset")
    onset_idx = int(np.argmax(diffs)) + 1
    onset_temp = float(t[onset_idx])
    if not onset_temp < recovery_temp_c:
        raise FitError(
            f"onset temperature {onset_temp} is not below the recovery "
            f"temperature {recovery_temp_c}"
        )

    warm = np.flatnonzero(t > recovery_temp_c)
    warm = warm[warm >= onset_idx + RECOVERY_EXCLUSION_H]
    if warm.size == 0:
        raise FitError("temperature never exceeds the recovery temperature after onset")
    recovery_idx = int(warm[0])

    baseline_pre = float(o[0])
    plateau = float(np.mean(o[onset_idx:recovery_idx])) - baseline_pre
    if plateau <= 0:
        raise FitError("episode has no outage mass above the pre-onset baseline")

    baseline_post = float(np.mean(o[-TAIL_POINTS:]))
    slope = _fit_recovery_slope(o[recovery_idx:], baseline_post)
    if slope is None or slope <= 0:
        slope = plateau  # no declining segment: treat the drop as instantaneous

    return OutageModel(
        technology=episode.technology,
        onset_temp_c=onset_temp,
        plateau_gw=plateau,
        recovery_slope_gw_per_h=float(slope),
        recovery_temp_c=float(recovery_temp_c),
        baseline_pre_gw=baseline_pre,
        baseline_post_gw=baseline_post,
    )


def _fit_recovery_slope(values: np.ndarray, tail_level: float) -> float | None:
    """Decline rate (GW/h, positive) of the best two-piece post-recovery fit.

    Candidate breakpoints k split the data into a line over [0, k] and a
    constant at ``tail_level`` beyond; the k minimizing total SSE wins.
    Returns None when no candidate admits a declining line.
    """
    m = len(values)
    if m < 3:
        return None
    x = np.arange(m, dtype=float)
    best_sse = np.inf
    best_slope = None
    for k in range(1, m):
        seg = values[: k + 1]
        xs = x[: k + 1]
        b, a = np.polyfit(xs, seg, 1)
        sse = float(np.sum((seg - (a + b * xs)) ** 2))
        tail = values[k + 1 :]
        sse += float(np.sum((tail - tail_level) ** 2))
        if sse < best_sse - 1e-12:
            best_sse = sse
            best_slope = b
    if best_slope is None or best_slope >= 0:
        return None
    return -float(best_slope)


def simulate_outages(model: OutageModel, temps) -> np.ndarray:
    """Replay an outage model over a temperature series.

    Returns hourly outage GW with the constant pre/post baselines removed:
    zero until the temperature drops below the onset, the plateau until the
    temperature exceeds the recovery threshold and at least
    ``min_full_hours`` have passed since the trigger, then a linear decline
    at the recovery slope. Any sub-onset hour during the decline restores
    the full plateau with a fresh minimum-duration clock.
    """
    if isinstance(temps, WeightedTemperatureSeries):
        t = temps.values
    else:
        t = as_float_array(temps, "temperatures")
    n = len(t)
    outage = np.zeros(n)

    triggers = np.flatnonzero(t < model.onset_temp_c)
    if triggers.size == 0:
        return outage
    warm = np.flatnonzero(t > model.recovery_temp_c)

    plateau = model.plateau_gw
    slope = model.recovery_slope_gw_per_h
    n_decline = int(np.ceil(plateau / slope))

    cursor = 0
    while True:
        pos = np.searchsorted(triggers, cursor)
        if pos == len(triggers):
            break
        start = int(triggers[pos])

        # Full outage until the first warm hour past the minimum duration.
        wpos = np.searchsorted(warm, start + model.min_full_hours)
        if wpos == len(warm):
            outage[start:] = plateau
            break
        exit_idx = int(warm[wpos])
        outage[start:exit_idx] = plateau

        # Linear decline, interrupted by any new trigger.
        decline_end = min(exit_idx + n_decline, n)
        steps = np.arange(1, decline_end - exit_idx + 1, dtype=float)
        tpos = np.searchsorted(triggers, exit_idx)
        if tpos < len(triggers) and triggers[tpos] < decline_end:
            retrigger = int(triggers[tpos])
            k = retrigger - exit_idx
            outage[exit_idx:retrigger] = np.maximum(plateau - slope * steps[:k], 0.0)
            cursor = retrigger
        else:
            k = decline_end - exit_idx
            outage[exit_idx:decline_end] = np.maximum(plateau - slope * steps[:k], 0.0)
            cursor = decline_end
    return outage


def shift_thresholds(model: OutageModel, d_onset_c: float, d_recovery_c: float = 0.0) -> OutageModel:
    """Copy with shifted onset/recovery temperatures (ordering re-checked)."""
    return replace(
        model,
        onset_temp_c=model.onset_temp_c + float(d_onset_c),
        recovery_temp_c=model.recovery_temp_c + float(d_recovery_c),
    )


class OutageCurve(BaseEstimator):
    """Estimator wrapper around the 4-segment outage fit.

    Parameters
    ----------
    technology : str
        Technology label carried into the fitted model.
    recovery_temp_c : float
        Temperature above which recovery can begin.

    Attributes
    ----------
    model_ : OutageModel
        Fitted parameter set; :meth:`predict` replays it.
    """

    def __init__(self, technology: str = "gas", recovery_temp_c: float = 0.0):
        self.technology = technology
        self.recovery_temp_c = recovery_temp_c

    def fit(self, X, y):
        """Fit on aligned temperatures ``X`` (n,) or (n, 1) and outages ``y``."""
        temps = np.asarray(X, dtype=float)
        if temps.ndim == 2 and temps.shape[1] == 1:
            temps = temps[:, 0]
        episode = OutageEpisode(np.asarray(y, dtype=float), temps, self.technology)
        self.model_ = fit_outage_model(episode, recovery_temp_c=self.recovery_temp_c)
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise FitError("outage curve is not fitted")
        temps = np.asarray(X, dtype=float)
        if temps.ndim == 2 and temps.shape[1] == 1:
            temps = temps[:, 0]
        return simulate_outages(self.model_, temps)


def save_outage_model(model: OutageModel, path) -> None:
    lines = [
        f"technology = {model.technology}",
        f"onset_temp_c = {float(model.onset_temp_c)!r}",
        f"plateau_gw = {float(model.plateau_gw)!r}",
        f"recovery_slope_gw_per_h = {float(model.recovery_slope_gw_per_h)!r}",
        f"recovery_temp_c = {float(model.recovery_temp_c)!r}",
        f"min_full_hours = {model.min_full_hours}",
        f"baseline_pre_gw = {float(model.baseline_pre_gw)!r}",
        f"baseline_post_gw = {float(model.baseline_post_gw)!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_outage_model(path) -> OutageModel:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputDataError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    try:
        return OutageModel(
            technology=entries["technology"],
            onset_temp_c=float(entries["onset_temp_c"]),
            plateau_gw=float(entries["plateau_gw"]),
            recovery_slope_gw_per_h=float(entries["recovery_slope_gw_per_h"]),
            recovery_temp_c=float(entries["recovery_temp_c"]),
            min_full_hours=int(entries["min_full_hours"]),
            baseline_pre_gw=float(entries["baseline_pre_gw"]),
            baseline_post_gw=float(entries["baseline_post_gw"]),
        )
    except KeyError as exc:
        raise InputDataError(f"{path}: missing entry {exc}") from exc


def read_episode_csv(path, temps: WeightedTemperatureSeries, technology: str) -> OutageEpisode:
    """Read an outage episode CSV (timestamp, tech, outage_gw) for one technology.

    Episode rows are aligned to the temperature series by timestamp; every
    episode hour must be covered by the series.
    """
    df = pd.read_csv(path)
    check_columns(df, ("timestamp", "tech", "outage_gw"), path)
    df = df[df["tech"] == technology]
    if df.empty:
        raise InputDataError(f"{path}: no rows for technology '{technology}'")
    try:
        stamps = pd.DatetimeIndex(pd.to_datetime(df["timestamp"], format="ISO8601"))
    except ValueError as exc:
        raise InputDataError(f"{path}: unparseable timestamp ({exc})") from exc

    pos = temps.timestamps.get_indexer(stamps)
    if np.any(pos < 0):
        raise InputDataError(f"{path}: episode hours missing from the temperature series")
    return OutageEpisode(
        outage_gw=df["outage_gw"].to_numpy(dtype=float),
        temps_c=temps.values[pos],
        technology=technology,
        timestamps=stamps,
    )
