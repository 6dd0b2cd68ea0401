"""Training samples for the zone regression: CSV I/O and a synthetic generator.

The generator walks admissible setpoints through every typical day and
records the cooling energy a known zone model predicts, optionally with
Gaussian noise, so fitting can be checked against the generating
coefficients.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .profiles import DsmConfig, hour_class
from .regression import FEATURES, ZoneCoolingRegressor, ZoneThermalModel

SAMPLE_COLUMNS = ("zone", "hour", "T_inf", "E_rate", "T", "T_lag1", "T_lag2", "T_lag3", "tau",
                  "other_sum", "ase")


def _walk(rng, n, lo, hi, ramp, start):
    out = np.empty(n)
    t = start
    for i in range(n):
        t = float(np.clip(t + rng.uniform(-ramp, ramp), lo, hi))
        out[i] = t
    return out


def generate_samples(cfg: DsmConfig, seed: int = 0, noise: float = 0.0,
                     n_slots: int | None = None) -> pd.DataFrame:
    """One row per zone and slot; zones of a node share the random walk draw order."""
    rng = np.random.default_rng(seed)
    c = cfg.comfort
    n = cfg.ambient.size if n_slots is None else int(n_slots)
    rows = []
    for node in cfg.nodes():
        zones = cfg.zones_at(node)
        temps = {z.zone_id: _walk(rng, n, c.t_min, c.t_max, c.max_ramp, c.midpoint) for z in zones}
        for z in zones:
            T = temps[z.zone_id]
            full = np.concatenate([[c.midpoint] * 3, T])
            others = sum(temps[o.zone_id] for o in zones if o.zone_id != z.zone_id) + np.zeros(n)
            hours = np.arange(n)
            X = np.column_stack([z.energy_rate[:n], cfg.ambient[:n], T, full[2:2 + n],
                                 full[1:1 + n], full[0:n], [hour_class(h) for h in hours],
                                 others])
            b = np.array(z.model.beta)
            ase = b[0] + X @ b[1:] + (rng.normal(0.0, noise, n) if noise > 0 else 0.0)
            df = pd.DataFrame(X, columns=list(FEATURES))
            df.insert(0, "hour", hours)
            df.insert(0, "zone", z.zone_id)
            df["ase"] = ase
            rows.append(df)
    return pd.concat(rows, ignore_index=True)[list(SAMPLE_COLUMNS)]


def read_samples_csv(path) -> pd.DataFrame:
    df = pd.read_csv(path, dtype={"zone": str})
    if tuple(df.columns) != SAMPLE_COLUMNS:
        raise ValueError(f"{path}: header must be {','.join(SAMPLE_COLUMNS)}")
    if df.drop(columns="zone").isna().any().any():
        raise ValueError(f"{path}: missing numeric values")
    return df


def write_samples_csv(df: pd.DataFrame, path):
    df[list(SAMPLE_COLUMNS)].to_csv(path, index=False, float_format="%.10g")


def fit_models(df: pd.DataFrame) -> dict[str, ZoneThermalModel]:
    """Fit one regression per zone, in zone-id order."""
    models = {}
    for zone, grp in sorted(df.groupby("zone", sort=True), key=lambda kv: kv[0]):
        reg = ZoneCoolingRegressor(zone_id=str(zone)).fit(grp[list(FEATURES)].to_numpy(float),
                                                          grp["ase"].to_numpy(float))
        models[str(zone)] = reg.model_
    return models
