"""Frost and power-deficit event statistics.

Events are maximal runs beyond a threshold (temperature below 0 degC, or
capacity deficit above 0 GW), pooled when separated by less than an
inter-event gap so minor thaw episodes do not split one cold spell into
several events. Each event carries duration, intensity (series extremum)
and severity (sum beyond the threshold). Annual extreme series feed a
GEV fit by L-moments, return periods, and robust trend tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.special import gamma as gamma_fn
from scipy.stats import norm

from .calendars import event_year
from .validation import FitError, InputDataError, as_float_array, check_hourly

EULER_GAMMA = 0.5772156649015329

DEFAULT_INTER_EVENT_H = 24


@dataclass
class DeficitEvent:
    """One pooled run: span, duration, intensity, severity, season year."""

    start: pd.Timestamp
    end: pd.Timestamp
    duration_h: int
    intensity: float
    severity: float
    year: int


def extract_events(
    values,
    timestamps,
    threshold: float = 0.0,
    mode: str = "above",
    inter_event_h: int = DEFAULT_INTER_EVENT_H,
) -> list[DeficitEvent]:
    """Extract threshold runs and pool runs separated by short gaps.

    Parameters
    ----------
    values, timestamps : array-like
        Contiguous hourly series.
    threshold : float
        Run threshold (0 GW for deficits, 0 degC for frost).
    mode : {"above", "below"}
        Run condition: values strictly above or strictly below the
        threshold.
    inter_event_h : int
        Runs separated by fewer than this many hours merge into one event
        spanning the first start to the last end. Severity counts only
        beyond-threshold hours within the pooled span; intensity is the
        extremum over the span.
    """
    v = as_float_array(values, "series")
    ts = check_hourly(timestamps)
    if len(v) != len(ts):
        raise InputDataError("series values and timestamps differ in length")
    if mode not in ("above", "below"):
        raise InputDataError(f"mode must be 'above' or 'below', got '{mode}'")

    exceed = v > threshold if mode == "above" else v < threshold
    if not exceed.any():
        return []

    flags = np.concatenate(([0], exceed.astype(np.int8), [0]))
    edges = np.diff(flags)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1  # inclusive

    pooled: list[list[int]] = [[int(starts[0]), int(ends[0])]]
    for s, e in zip(starts[1:], ends[1:]):
        gap = int(s) - pooled[-1][1] - 1
        if gap < inter_event_h:
            pooled[-1][1] = int(e)
        else:
            pooled.append([int(s), int(e)])

    events = []
    for s, e in pooled:
        window = v[s : e + 1]
        mask = exceed[s : e + 1]
        if mode == "above":
            severity = float(np.sum(window[mask] - threshold))
            intensity = float(window.max())
        else:
            severity = float(np.sum(threshold - window[mask]))
            intensity = float(window.min())
        events.append(
            DeficitEvent(
                start=ts[s],
                end=ts[e],
                duration_h=e - s + 1,
                intensity=intensity,
                severity=severity,
                year=int(event_year(ts[s : s + 1])[0]),
            )
        )
    return events


def annual_series(events: list[DeficitEvent]) -> dict[int, DeficitEvent]:
    """Per year, the event with the largest severity; event-less years absent."""
    best: dict[int, DeficitEvent] = {}
    for ev in events:
        cur = best.get(ev.year)
        if cur is None or ev.severity > cur.severity:
            best[ev.year] = ev
    return dict(sorted(best.items()))


def events_to_frame(events: list[DeficitEvent]) -> pd.DataFrame:
    """Events as a table: year, start, end, duration_h, intensity, severity."""
    return pd.DataFrame(
        [
            {
                "year": ev.year,
                "start": ev.start,
                "end": ev.end,
                "duration_h": ev.duration_h,
                "intensity": ev.intensity,
                "severity": ev.severity,
            }
            for ev in events
        ],
        columns=["year", "start", "end", "duration_h", "intensity", "severity"],
    )


# ---------------------------------------------------------------------------
# Extreme value statistics
# ---------------------------------------------------------------------------

@dataclass
class GevFit:
    """GEV parameters (shape xi: positive = heavy upper tail).

    The CDF is F(x) = exp(-(1 + xi*z)^(-1/xi)) with z = (x - loc)/scale,
    reducing to the Gumbel exp(-exp(-z)) at xi = 0. Minima series are
    fitted on their negation (``minima=True``) so the same machinery
    applies.
    """

    loc: float
    scale: float
    shape: float
    n: int
    method: str = "l-moments"
    minima: bool = False

    def cdf(self, x: float) -> float:
        z = (x - self.loc) / self.scale
        if abs(self.shape) < 1e-12:
            return float(np.exp(-np.exp(-z)))
        s = 1.0 + self.shape * z
        if s <= 0.0:
            return 0.0 if self.shape > 0 else 1.0
        return float(np.exp(-(s ** (-1.0 / self.shape))))

    def ppf(self, q: float) -> float:
        if not 0.0 < q < 1.0:
            raise InputDataError("quantile level must lie in (0, 1)")
        if abs(self.shape) < 1e-12:
            return self.loc - self.scale * math.log(-math.log(q))
        return self.loc + self.scale * ((-math.log(q)) ** (-self.shape) - 1.0) / self.shape

    def median(self) -> float:
        return self.ppf(0.5)


def _sample_l_moments(values: np.ndarray) -> tuple[float, float, float]:
    """First two L-moments and the L-skewness via unbiased PWM estimators."""
    x = np.sort(values)
    n = len(x)
    j = np.arange(1, n + 1, dtype=float)
    b0 = x.mean()
    b1 = np.sum((j - 1) / (n - 1) * x) / n
    b2 = np.sum((j - 1) * (j - 2) / ((n - 1) * (n - 2)) * x) / n
    l1 = b0
    l2 = 2.0 * b1 - b0
    l3 = 6.0 * b2 - 6.0 * b1 + b0
    return l1, l2, l3 / l2 if l2 != 0 else np.nan


def fit_gev(values, minima: bool = False) -> GevFit:
    """Fit a GEV distribution to an annual extreme series by L-moments.

    Uses the probability-weighted-moment estimators with the rational
    approximation for the shape from the L-skewness. ``minima=True``
    negates the series first (annual minima, e.g. frost intensity).
    """
    v = as_float_array(values, "annual extremes")
    if len(v) < 5:
        raise FitError("need at least 5 annual values to fit a GEV distribution")
    if np.ptp(v) == 0:
        raise FitError("degenerate sample: all annual values are equal")
    if minima:
        v = -v

    l1, l2, t3 = _sample_l_moments(v)
    if not np.isfinite(t3) or l2 <= 0 or abs(t3) >= 1:
        raise FitError("invalid L-moments; sample unsuitable for a GEV fit")

    c = 2.0 / (3.0 + t3) - math.log(2.0) / math.log(3.0)
    k = 7.8590 * c + 2.9554 * c**2  # Hosking's kappa; shape xi = -k
    if abs(k) < 1e-8:
        scale = l2 / math.log(2.0)
        loc = l1 - EULER_GAMMA * scale
        shape = 0.0
    else:
        g = gamma_fn(1.0 + k)
        scale = l2 * k / ((1.0 - 2.0**-k) * g)
        loc = l1 - scale * (1.0 - g) / k
        shape = -k
    if scale <= 0:
        raise FitError("GEV fit produced a non-positive scale")
    return GevFit(loc=float(loc), scale=float(scale), shape=float(shape), n=len(v), minima=minima)


def return_period(fit: GevFit, value: float) -> float:
    """Expected recurrence interval, T = 1 / (1 - F(value)), in years.

    For minima-type fits the value is negated to match the internally
    negated distribution. An exceedance probability of zero yields
    ``math.inf`` as the distinct infinite-return-period signal.
    """
    x = -value if fit.minima else value
    p_exceed = 1.0 - fit.cdf(x)
    if p_exceed <= 0.0:
        return math.inf
    return 1.0 / p_exceed


# ---------------------------------------------------------------------------
# Trend tests
# ---------------------------------------------------------------------------

@dataclass
class TrendResult:
    """Robust trend summary for one annual series."""

    n_events: int
    slope_per_year: float
    slope_71yr: float  # slope_per_year * 71, mirroring the 71-year framing
    p_value: float
    threshold_c: float | None = None


def theil_sen_slope(values, years) -> float:
    """Median of all pairwise slopes."""
    v = as_float_array(values, "values")
    y = as_float_array(years, "years")
    if len(v) != len(y):
        raise InputDataError("values and years differ in length")
    dy = np.subtract.outer(y, y)
    dv = np.subtract.outer(v, v)
    iu = np.triu_indices(len(v), k=1)
    dy, dv = dy[iu], dv[iu]
    keep = dy != 0
    if not keep.any():
        raise InputDataError("all years are identical")
    return float(np.median(dv[keep] / dy[keep]))


def mann_kendall_p(values) -> float:
    """Two-sided Mann-Kendall p-value (normal approximation, tie-corrected)."""
    v = as_float_array(values, "values")
    n = len(v)
    sgn = np.sign(np.subtract.outer(v, v))
    s = float(np.sum(sgn[np.triu_indices(n, k=1)]))

    _, counts = np.unique(v, return_counts=True)
    ties = counts[counts > 1]
    var_s = (n * (n - 1) * (2 * n + 5) - np.sum(ties * (ties - 1) * (2 * ties + 5))) / 18.0
    if var_s <= 0:
        return 1.0
    if s > 0:
        z = (s - 1.0) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1.0) / math.sqrt(var_s)
    else:
        z = 0.0
    return float(min(1.0, 2.0 * norm.sf(abs(z))))


def trend_test(values, years, threshold_c: float | None = None) -> TrendResult:
    """Theil-Sen slope with a Mann-Kendall two-sided p-value."""
    v = as_float_array(values, "values")
    y = as_float_array(years, "years")
    if len(v) < 5:
        raise InputDataError("need at least 5 points for a trend test")
    slope = theil_sen_slope(v, y)
    p = mann_kendall_p(v)
    return TrendResult(
        n_events=len(v),
        slope_per_year=slope,
        slope_71yr=slope * 71.0,
        p_value=p,
        threshold_c=threshold_c,
    )


def mean_temp_trend(annual_means, years) -> float:
    """OLS slope of annual mean temperature versus year, degC per year."""
    m = as_float_array(annual_means, "annual means")
    y = as_float_array(years, "years")
    if len(m) < 5:
        raise InputDataError("need at least 5 annual means")
    if len(m) != len(y):
        raise InputDataError("means and years differ in length")
    return float(np.polyfit(y, m, 1)[0])


def annual_minima(values, timestamps) -> pd.DataFrame:
    """Minimum temperature per event-year: columns year, min_c."""
    v = as_float_array(values, "series")
    ts = check_hourly(timestamps)
    years = event_year(ts)
    df = pd.DataFrame({"year": years, "v": v})
    g = df.groupby("year")["v"].min().reset_index()
    return g.rename(columns={"v": "min_c"})


def annual_means(values, timestamps) -> pd.DataFrame:
    """Mean temperature per calendar year: columns year, mean_c."""
    v = as_float_array(values, "series")
    ts = check_hourly(timestamps)
    df = pd.DataFrame({"year": ts.year, "v": v})
    g = df.groupby("year")["v"].mean().reset_index()
    return g.rename(columns={"v": "mean_c"})


def threshold_trend_table(annual_min_c, years, thresholds_c) -> pd.DataFrame:
    """Trend of annual minima restricted to years colder than each threshold.

    Mirrors a stratified cold-extremes analysis: for each threshold, the
    years whose minimum lies strictly below it form the event set; their
    minima are trend-tested. Rows with fewer than 5 events report NaN
    slope and p-value but still list the event count.
    """
    mins = as_float_array(annual_min_c, "annual minima")
    yrs = as_float_array(years, "years")
    rows = []
    for thr in thresholds_c:
        sel = mins < thr
        count = int(sel.sum())
        if count >= 5:
            res = trend_test(mins[sel], yrs[sel], threshold_c=thr)
            slope, slope71, p = res.slope_per_year, res.slope_71yr, res.p_value
        else:
            slope = slope71 = p = float("nan")
        rows.append(
            {
                "threshold_c": float(thr),
                "events": count,
                "slope_yearly": slope,
                "slope_71yr": slope71,
                "p_value": p,
            }
        )
    return pd.DataFrame(rows)
