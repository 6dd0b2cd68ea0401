"""Synthetic typical-day shapes and affine profile calibration.

The bundled shapes are hand-authored smooth templates (12 months x 24 h),
not measured data.  :func:`synthesize_profile` maps a shape onto a profile
with a prescribed annual usage and peak.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LoadProfile, TimeStructure

HOURS = np.arange(24)


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True)
class SynthesisSpec:
    target_usage_mwh: float
    target_peak_kw: float
    shape: np.ndarray  # one value per slot, max 1

    def __post_init__(self):
        s = np.array(self.shape, dtype=float).reshape(-1)
        s.setflags(write=False)
        object.__setattr__(self, "shape", s)


def synthesize_profile(spec: SynthesisSpec, time: TimeStructure, rtol: float = 1e-3) -> LoadProfile:
    """Return ``a * shape + b`` (a, b >= 0) with the target usage and peak.

    Raises :class:`SynthesisError` when the peak is below the flat-load
    average ``usage * 1000 / hours`` or when the shape is too flat to reach
    the targets without a negative offset.
    """
    s = spec.shape
    if s.size != time.n_slots:
        raise SynthesisError(f"shape has {s.size} values, time structure has {time.n_slots}")
    if np.any(s < 0) or np.any(s > 1 + 1e-12) or (s.size and abs(s.max() - 1.0) > 1e-12):
        raise SynthesisError("shape values must lie in [0, 1] with maximum 1")
    w = time.slot_weights
    W = float(w.sum())
    U = spec.target_usage_mwh * 1000.0
    P = spec.target_peak_kw
    if U < 0 or P < 0:
        raise SynthesisError("targets must be >= 0")
    if P * W < U * (1 - 1e-12):
        raise SynthesisError(
            f"peak {P:g} kW is below the flat-load bound {U / W:g} kW (usage/hours)")
    S = float(s @ w)
    if W - S <= 1e-12 * W:
        if abs(P * W - U) > rtol * max(U, 1e-12):
            raise SynthesisError("flat shape can only reproduce usage = peak * hours")
        a, b = 0.0, P
    else:
        a = (P * W - U) / (W - S)
        b = P - a
    if b < -1e-9 * max(P, 1.0):
        raise SynthesisError(
            f"shape mean {S / W:.4f} exceeds the target load factor {U / (P * W):.4f}; "
            "no non-negative offset reproduces both targets")
    b = max(b, 0.0)
    return LoadProfile(a * s + b)


def _bump(center, width, power=2.0):
    return np.exp(-np.abs((HOURS - center) / width) ** power)


MONTHLY_TEMP_C = np.array([0.5, 2.0, 6.5, 12.5, 18.0, 23.0, 26.0, 25.0, 21.0, 14.5, 8.5, 3.0])
# clear-sky scaling of PV availability per month
PV_MONTH = np.array([0.45, 0.55, 0.65, 0.75, 0.85, 0.9, 0.92, 0.88, 0.78, 0.65, 0.5, 0.42])
OFFICE_COOL_MONTH = np.array([0, 0, 0.02, 0.1, 0.35, 0.75, 1.0, 0.95, 0.6, 0.15, 0.02, 0])
APT_COOL_MONTH = np.array([0, 0, 0, 0.02, 0.12, 0.45, 1.0, 0.85, 0.3, 0.03, 0, 0])
ELEC_MONTH = np.array([0.88, 0.86, 0.84, 0.85, 0.9, 0.97, 1.0, 1.0, 0.93, 0.86, 0.86, 0.9])


def _normalise(grid12x24):
    g = np.asarray(grid12x24, dtype=float)
    return g / g.max()


def shape_template(name: str) -> np.ndarray:
    """12 x 24 template, maximum 1.  Names: office_electric, apartment_electric,
    office_cooling, apartment_cooling, pv."""
    if name == "office_electric":
        day = 0.05 + 0.95 * _bump(12.5, 3.2, 4)
        g = ELEC_MONTH[:, None] * day[None, :]
    elif name == "apartment_electric":
        day = 0.1 + 0.4 * _bump(7.5, 1.5) + 0.9 * _bump(19.5, 2.2)
        g = ELEC_MONTH[:, None] * day[None, :]
    elif name == "office_cooling":
        g = OFFICE_COOL_MONTH[:, None] * _bump(14.5, 3.5)[None, :]
    elif name == "apartment_cooling":
        g = APT_COOL_MONTH[:, None] * _bump(17.0, 2.0)[None, :]
    elif name == "pv":
        day = np.clip(np.sin(np.pi * (HOURS - 5.5) / 14.0), 0, None) ** 1.3
        g = PV_MONTH[:, None] * day[None, :]
        return 0.8 * g / g.max()
    else:
        raise KeyError(f"unknown template {name!r}")
    return _normalise(g)


def template_profile(name: str, time: TimeStructure) -> np.ndarray:
    """Lay a monthly template onto the typical days of ``time`` (by month)."""
    g = shape_template(name)
    vals = np.concatenate([g[d.month - 1] for d in time.typical_days])
    if name != "pv" and vals.size:
        vals = vals / vals.max()
    return vals


def ambient_profile(time: TimeStructure, amplitude: float = 5.0) -> np.ndarray:
    """Dry-bulb temperature (degC) per slot: monthly mean plus a diurnal swing."""
    diurnal = amplitude * np.cos(2 * np.pi * (HOURS - 15) / 24)
    return np.concatenate([MONTHLY_TEMP_C[d.month - 1] + diurnal for d in time.typical_days])


def tou_prices(time: TimeStructure, base: float = 0.08, peak_adder: float = 0.06,
               summer_adder: float = 0.04) -> np.ndarray:
    """Time-of-use energy price ($/kWh) with an afternoon peak, higher in summer."""
    day = _bump(16.0, 3.0)
    out = []
    for d in time.typical_days:
        summer = 1.0 if d.month in (6, 7, 8, 9) else 0.0
        out.append(base + peak_adder * day + summer_adder * summer * day)
    return np.concatenate(out)
