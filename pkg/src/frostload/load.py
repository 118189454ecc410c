"""Temperature-dependent winter electricity demand regression.

Demand is modelled as an ordinary least-squares fit of hourly winter load
on calendar dummies (day of week, hour of day, holidays), a yearly
sine/cosine pair, and the weighted temperature with its fourth power. The
quartic term captures the sharp non-linear rise of heating load at deep
frost. Reference levels (Sunday, hour 0) are dropped from the design so
the intercept stays identifiable; the persisted model still lists every
named coefficient with the reference levels at zero.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, RegressorMixin
from threadpoolctl import threadpool_limits

from .calendars import seasonal_angle
from .validation import FitError, InputDataError, as_float_array, check_columns
from .weather import WeightedTemperatureSeries

DOW_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

# Design matrix columns, in the order build_design emits them. Sunday and
# hour 0 are the dropped reference levels.
DESIGN_COLUMNS = (
    ("intercept",)
    + tuple(f"dow_{d}" for d in DOW_NAMES[:6])
    + tuple(f"hod_{h:02d}" for h in range(1, 24))
    + ("holiday", "sin_hoy", "cos_hoy", "temp_c", "temp_c4")
)

# Full named coefficient set, reference levels included (always 0).
COEFFICIENT_NAMES = (
    ("intercept",)
    + tuple(f"dow_{d}" for d in DOW_NAMES)
    + tuple(f"hod_{h:02d}" for h in range(24))
    + ("holiday", "sin_hoy", "cos_hoy", "temp_c", "temp_c4")
)

N_DESIGN_COLUMNS = len(DESIGN_COLUMNS)
N_COEFFICIENTS = len(COEFFICIENT_NAMES)

_FREE_IN_FULL = tuple(COEFFICIENT_NAMES.index(c) for c in DESIGN_COLUMNS)


def build_design(timestamps, temps, holidays=frozenset()) -> np.ndarray:
    """Build the demand design matrix for the given hours.

    Parameters
    ----------
    timestamps : DatetimeIndex-like
        Hours to encode (winter hours when fitting).
    temps : array-like or WeightedTemperatureSeries
        Temperature index aligned with ``timestamps`` (population-weighted
        for demand modelling).
    holidays : set of datetime.date
        Dates flagged by the holiday dummy.

    Returns
    -------
    ndarray of shape (n_hours, 35)
        Columns in the fixed :data:`DESIGN_COLUMNS` order.
    """
    idx = pd.DatetimeIndex(timestamps)
    if isinstance(temps, WeightedTemperatureSeries):
        if len(temps) != len(idx) or not np.array_equal(temps.timestamps.asi8, idx.asi8):
            raise InputDataError("temperature series is not aligned with the timestamps")
        temps = temps.values
    t = as_float_array(temps, "temperatures")
    if len(t) != len(idx):
        raise InputDataError("temperatures are not aligned with the timestamps")

    n = len(idx)
    X = np.zeros((n, N_DESIGN_COLUMNS))
    X[:, 0] = 1.0

    dow = idx.dayofweek.to_numpy()  # Monday=0 .. Sunday=6
    for d in range(6):
        X[:, 1 + d] = dow == d
    hod = idx.hour.to_numpy()
    for h in range(1, 24):
        X[:, 6 + h] = hod == h

    holiday_set = frozenset(holidays)
    if holiday_set:
        X[:, 30] = np.fromiter((ts.date() in holiday_set for ts in idx), dtype=float, count=n)

    angle = seasonal_angle(idx)
    X[:, 31] = np.sin(angle)
    X[:, 32] = np.cos(angle)
    X[:, 33] = t
    X[:, 34] = t**4
    return X


class TemperatureLoadModel(RegressorMixin, BaseEstimator):
    """OLS winter demand model on the fixed calendar/temperature design.

    Parameters
    ----------
    label : str, optional
        Training label carried into the persisted model file (typically the
        training year).

    Attributes
    ----------
    coef_ : ndarray of shape (35,)
        Fitted coefficients, aligned with :data:`DESIGN_COLUMNS`.
    rmse_ : float
        In-sample root-mean-square error, GW.
    r2_ : float
        In-sample coefficient of determination.
    n_obs_ : int
        Number of training hours.
    """

    def __init__(self, label: str = ""):
        self.label = label

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = as_float_array(y, "load")
        if X.ndim != 2 or X.shape[1] != N_DESIGN_COLUMNS:
            raise InputDataError(
                f"design must have {N_DESIGN_COLUMNS} columns, got {X.shape}"
            )
        if X.shape[0] != len(y):
            raise InputDataError("design and load series differ in length")
        if X.shape[0] < X.shape[1]:
            raise InputDataError("need at least as many hours as design columns")
        if not np.all(np.isfinite(X)):
            raise InputDataError("design contains non-finite entries")

        # multi-threaded BLAS reorders the SVD reductions, so the solve is
        # pinned to one thread to keep fits bit-reproducible
        with threadpool_limits(limits=1, user_api="blas"):
            coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        if rank < X.shape[1]:
            raise FitError(
                "rank-deficient design (duplicated regressor or empty category)"
            )
        residuals = y - X @ coef
        ss_res = float(residuals @ residuals)
        ss_tot = float(np.sum((y - y.mean()) ** 2))

        self.coef_ = coef
        self.rmse_ = float(np.sqrt(ss_res / len(y)))
        self.r2_ = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
        self.n_obs_ = int(len(y))
        return self

    def predict(self, X):
        if not hasattr(self, "coef_"):
            raise FitError("model is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != N_DESIGN_COLUMNS:
            raise InputDataError(
                f"design must have {N_DESIGN_COLUMNS} columns, got {X.shape}"
            )
        return X @ self.coef_

    def coefficients(self) -> dict[str, float]:
        """All named coefficients including zero-valued reference levels."""
        if not hasattr(self, "coef_"):
            raise FitError("model is not fitted")
        full = np.zeros(N_COEFFICIENTS)
        full[list(_FREE_IN_FULL)] = self.coef_
        return dict(zip(COEFFICIENT_NAMES, full))


def save_load_model(model: TemperatureLoadModel, path) -> None:
    """Persist a fitted model as a plain-text key=value file."""
    lines = [
        f"label = {model.label}",
        f"n_obs = {model.n_obs_}",
        f"rmse_gw = {float(model.rmse_)!r}",
        f"r_squared = {float(model.r2_)!r}",
    ]
    lines += [f"coef_{name} = {float(value)!r}" for name, value in model.coefficients().items()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_load_model(path) -> TemperatureLoadModel:
    """Read a persisted model file back into an estimator."""
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
        model = TemperatureLoadModel(label=entries.get("label", ""))
        model.coef_ = np.array(
            [float(entries[f"coef_{name}"]) for name in DESIGN_COLUMNS]
        )
        model.rmse_ = float(entries["rmse_gw"])
        model.r2_ = float(entries["r_squared"])
        model.n_obs_ = int(entries["n_obs"])
    except KeyError as exc:
        raise InputDataError(f"{path}: missing entry {exc}") from exc
    return model


def read_load_csv(path) -> tuple[pd.DatetimeIndex, np.ndarray]:
    """Read an observed load CSV: timestamp, load_gw."""
    df = pd.read_csv(path)
    check_columns(df, ("timestamp", "load_gw"), path)
    try:
        stamps = pd.DatetimeIndex(pd.to_datetime(df["timestamp"], format="ISO8601"))
    except ValueError as exc:
        raise InputDataError(f"{path}: unparseable timestamp ({exc})") from exc
    return stamps, df["load_gw"].to_numpy(dtype=float)
