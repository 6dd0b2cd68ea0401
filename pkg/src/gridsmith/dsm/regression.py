"""Cooling-electricity regression for a thermal zone.

The model is affine in nine terms: an intercept, the zone energy rate, the
ambient temperature, the zone temperature now and at three lags, the
time-of-day class and the sum of the other zones' temperatures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

FEATURES = ("E_rate", "T_inf", "T", "T_lag1", "T_lag2", "T_lag3", "tau", "other_sum")
N_COEF = len(FEATURES) + 1


class RankDeficientError(ValueError):
    """The design matrix does not determine every coefficient."""

    def __init__(self, columns, n_samples):
        self.columns = tuple(columns)
        named = ", ".join(f"beta_{k} ({'intercept' if k == 0 else FEATURES[k - 1]})"
                          for k in self.columns)
        super().__init__(f"rank-deficient design ({n_samples} samples); "
                         f"collinear columns: {named}")


@dataclass(frozen=True)
class ZoneThermalModel:
    beta: tuple
    residual_sigma: float = 0.0
    zone_id: str = "zone"

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != N_COEF:
            raise ValueError(f"expected {N_COEF} coefficients, got {len(beta)}")
        if not all(np.isfinite(beta)):
            raise ValueError("coefficients must be finite")
        if self.residual_sigma < 0:
            raise ValueError("residual_sigma must be >= 0")
        object.__setattr__(self, "beta", beta)

    @property
    def coef(self) -> np.ndarray:
        return np.array(self.beta)


@dataclass(frozen=True)
class ZoneState:
    """Exogenous inputs for one zone at one step.

    ``temp_history`` holds the zone temperature at t-1, t-2, t-3.
    """

    temp_history: tuple
    energy_rate: float = 0.0
    ambient: float = 25.0
    time_of_day: float = 0.0

    def __post_init__(self):
        hist = tuple(float(t) for t in self.temp_history)
        if len(hist) != 3:
            raise ValueError("temp_history needs three lags")
        for t in hist + (float(self.ambient),):
            if not -40.0 <= t <= 60.0:
                raise ValueError(f"temperature {t} outside [-40, 60] degC")
        object.__setattr__(self, "temp_history", hist)


def feature_row(state: ZoneState, setpoint: float, other_zone_temps: float) -> np.ndarray:
    h1, h2, h3 = state.temp_history
    return np.array([state.energy_rate, state.ambient, setpoint, h1, h2, h3,
                     state.time_of_day, other_zone_temps], dtype=float)


def predict_cooling_energy(model: ZoneThermalModel, state: ZoneState, setpoint: float,
                           other_zone_temps: float) -> float:
    """Expected cooling electricity (kWh) for one step, floored at zero."""
    b = model.beta
    x = feature_row(state, setpoint, other_zone_temps)
    return max(0.0, b[0] + float(np.dot(b[1:], x)))


def collinear_columns(design: np.ndarray, rtol: float = 1e-10) -> list[int]:
    """Columns that add no rank when scanned left to right."""
    kept: list[int] = []
    dropped: list[int] = []
    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    Z = design / scale
    for k in range(Z.shape[1]):
        trial = Z[:, kept + [k]]
        if np.linalg.matrix_rank(trial, tol=rtol * max(Z.shape)) > len(kept):
            kept.append(k)
        else:
            dropped.append(k)
    return dropped


class ZoneCoolingRegressor(RegressorMixin, BaseEstimator):
    """Ordinary least squares over the eight zone features plus intercept.

    ``predict`` returns the unfloored linear mean so residuals are exact on
    the training data; planning code floors predictions at zero through
    :func:`predict_cooling_energy`.
    """

    def __init__(self, zone_id="zone"):
        self.zone_id = zone_id

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != len(FEATURES):
            raise ValueError(f"expected {len(FEATURES)} feature columns, got {X.shape[1]}")
        design = np.column_stack([np.ones(X.shape[0]), X])
        bad = collinear_columns(design)
        if bad:
            raise RankDeficientError(bad, X.shape[0])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        self.intercept_ = float(coef[0])
        self.coef_ = coef[1:]
        resid = y - design @ coef
        self.residual_sigma_ = float(np.sqrt(np.mean(resid ** 2)))
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return self.intercept_ + X @ self.coef_

    @property
    def model_(self) -> ZoneThermalModel:
        check_is_fitted(self, "coef_")
        return ZoneThermalModel((self.intercept_, *self.coef_), self.residual_sigma_,
                                str(self.zone_id))


def fit_zone_model(samples: Sequence, zone_id: str = "zone") -> ZoneThermalModel:
    """Fit from ``(state, setpoint, other_temps, observed_ase)`` tuples."""
    X = np.array([feature_row(s, sp, o) for s, sp, o, _ in samples]).reshape(-1, len(FEATURES))
    y = np.array([a for *_, a in samples], dtype=float)
    return ZoneCoolingRegressor(zone_id).fit(X, y).model_
