"""Scenario documents (JSON) and CSV profile files.

A scenario has the sections ``network``, ``catalog``, ``tariff``, ``time``,
``profiles`` and optionally ``dsm``.  Any hourly series may be given as

* an inline list of numbers,
* ``{"csv": "<path>"}`` with header ``hour,value`` (0-based hours, path
  relative to the scenario file),
* ``{"synthesize": {"template": name, "usage_mwh": u, "peak_kw": p}}``,
* ``{"template": name, "scale": s}`` (a bundled shape times ``s``),
* ``{"generator": "tou_prices" | "ambient", "params": {...}}``.

:func:`dump_scenario` always writes series inline, so its output re-parses
to an identical scenario.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .dsm.profiles import DsmConfig, ZoneConfig
from .dsm.regression import ZoneThermalModel
from .dsm.setpoint import ComfortSpec
from .model import (Bus, Cable, ContinuousTech, DiscreteTech, LoadProfile, NetworkModel, Tariff,
                    TechnologyCatalog, TimeStructure, TypicalDay)
from .synth import SynthesisSpec, ambient_profile, synthesize_profile, template_profile, tou_prices


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    network: NetworkModel
    catalog: TechnologyCatalog
    tariff: Tariff
    time: TimeStructure
    profiles: dict  # name -> LoadProfile
    dsm: Optional[DsmConfig] = None
    apply_dsm: bool = False
    label: str = "scenario"

    def profile_arrays(self) -> dict:
        return {k: v.values for k, v in self.profiles.items()}

    def with_profiles(self, updates: dict, label=None, apply_dsm=None) -> "Scenario":
        prof = dict(self.profiles)
        prof.update({k: v if isinstance(v, LoadProfile) else LoadProfile(v)
                     for k, v in updates.items()})
        return replace(self, profiles=prof, label=label or self.label,
                       apply_dsm=self.apply_dsm if apply_dsm is None else apply_dsm)


def read_profile_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["hour", "value"]:
            raise ScenarioError(f"{path}: header must be 'hour,value'")
        rows = [(int(r["hour"]), float(r["value"])) for r in reader]
    rows.sort()
    hours = [h for h, _ in rows]
    if hours != list(range(len(rows))):
        raise ScenarioError(f"{path}: hours must be 0..{len(rows) - 1} without gaps")
    return np.array([v for _, v in rows])


def write_profile_csv(path, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["hour", "value"])
        for h, v in enumerate(np.asarray(values, dtype=float)):
            w.writerow([h, repr(float(v))])


def _series(src, time: TimeStructure, base: Path) -> np.ndarray:
    if isinstance(src, (int, float)):
        return np.full(time.n_slots, float(src))
    if isinstance(src, list):
        return np.asarray(src, dtype=float)
    if not isinstance(src, dict):
        raise ScenarioError(f"unsupported series source {src!r}")
    if "csv" in src:
        p = Path(src["csv"])
        return read_profile_csv(p if p.is_absolute() else base / p)
    if "synthesize" in src:
        s = src["synthesize"]
        shape = template_profile(s["template"], time)
        return synthesize_profile(SynthesisSpec(s["usage_mwh"], s["peak_kw"], shape), time).values
    if "template" in src:
        return template_profile(src["template"], time) * float(src.get("scale", 1.0))
    if "generator" in src:
        params = src.get("params", {})
        if src["generator"] == "tou_prices":
            vals = tou_prices(time, **params)
        elif src["generator"] == "ambient":
            vals = ambient_profile(time, **params)
        else:
            raise ScenarioError(f"unknown generator {src['generator']!r}")
        return vals * float(src.get("scale", 1.0))
    raise ScenarioError(f"unsupported series source {src!r}")


def _day_series(src, time: TimeStructure, base: Path) -> np.ndarray:
    """Series that may also be given as one 24-h day repeated over every typical day."""
    if isinstance(src, list) and len(src) == time.hours_per_day != time.n_slots:
        return np.tile(np.asarray(src, dtype=float), time.n_days)
    return _series(src, time, base)


def _build(cls, d: dict, renames=None):
    d = dict(d)
    for old, new in (renames or {}).items():
        if old in d:
            d[new] = d.pop(old)
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ScenarioError(f"{cls.__name__}: unknown fields {sorted(unknown)}")
    return cls(**d)


def parse_scenario(doc: dict, base_dir=".") -> Scenario:
    base = Path(base_dir)
    try:
        t = doc["time"]
        time = TimeStructure(
            tuple(_build(TypicalDay, d) for d in t["typical_days"]) if "typical_days" in t
            else TimeStructure.monthly().typical_days,
            hours_per_day=t.get("hours_per_day", 24),
            planning_horizon_years=t.get("planning_horizon_years", 25),
            discount_rate=t.get("discount_rate", 0.05))
        n = doc["network"]
        net = NetworkModel(
            buses=tuple(_build(Bus, b) for b in n["buses"]),
            cables=tuple(_build(Cable, c, {"from": "from_bus", "to": "to_bus"})
                         for c in n.get("cables", [])),
            slack_bus=n["slack_bus"],
            **{k: n[k] for k in ("nominal_voltage_kv", "base_power_kva", "v_min", "v_max")
               if k in n})
        c = doc.get("catalog", {})
        catalog = TechnologyCatalog(tuple(_build(DiscreteTech, x) for x in c.get("discrete", [])),
                                    tuple(_build(ContinuousTech, x) for x in c.get("continuous", [])))
        tr = doc["tariff"]
        tariff = Tariff(
            energy_price=_series(tr["energy_price"], time, base),
            export_price=_series(tr.get("export_price", 0.0), time, base),
            **{k: tr[k] for k in ("demand_charge", "fuel_price_gas", "curtailment_penalty")
               if k in tr})
        profiles = {name: LoadProfile(_series(src, time, base))
                    for name, src in doc.get("profiles", {}).items()}
        dsm = None
        if doc.get("dsm"):
            dsm = _parse_dsm(doc["dsm"], time, base)
    except KeyError as err:
        raise ScenarioError(f"missing section or field: {err}") from err
    except TypeError as err:
        raise ScenarioError(str(err)) from err
    return Scenario(net, catalog, tariff, time, profiles, dsm, bool(doc.get("apply_dsm", False)),
                    doc.get("label", "scenario"))


def _parse_dsm(d: dict, time, base) -> DsmConfig:
    comfort = _build(ComfortSpec, d.get("comfort", {}))
    zones = []
    for z in d.get("zones", []):
        model = ZoneThermalModel(tuple(z["beta"]), z.get("residual_sigma", 0.0), str(z["zone_id"]))
        zones.append(ZoneConfig(
            zone_id=str(z["zone_id"]), node=str(z["node"]), model=model,
            energy_rate=_day_series(z["energy_rate"], time, base),
            occupants=_day_series(z["occupants"], time, base),
            baseline_setpoint=_day_series(z["baseline_setpoint"], time, base)))
    return DsmConfig(tuple(zones), _series(d["ambient"], time, base), comfort,
                     grid_step=d.get("grid_step", 0.5), horizon=d.get("horizon", 6),
                     max_sweeps=d.get("max_sweeps", 20), chiller_cop=d.get("chiller_cop", 3.0))


def load_scenario(path) -> Scenario:
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    return parse_scenario(doc, path.parent)


def _num(v):
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return v


def _floats(arr):
    return [float(v) for v in np.asarray(arr, dtype=float)]


def scenario_to_dict(s: Scenario) -> dict:
    """Fully inline JSON-ready document."""
    net = s.network
    doc = {
        "label": s.label,
        "apply_dsm": s.apply_dsm,
        "network": {
            "slack_bus": net.slack_bus, "nominal_voltage_kv": net.nominal_voltage_kv,
            "base_power_kva": net.base_power_kva, "v_min": net.v_min, "v_max": net.v_max,
            "buses": [{**asdict(b), "candidate_techs": list(b.candidate_techs)} for b in net.buses],
            "cables": [{"from": c.from_bus, "to": c.to_bus,
                        **{k: v for k, v in asdict(c).items() if k not in ("from_bus", "to_bus")}}
                       for c in net.cables],
        },
        "catalog": {"discrete": [asdict(t) for t in s.catalog.discrete],
                    "continuous": [asdict(t) for t in s.catalog.continuous]},
        "tariff": {"energy_price": _floats(s.tariff.energy_price),
                   "export_price": _floats(s.tariff.export_price),
                   "demand_charge": s.tariff.demand_charge,
                   "fuel_price_gas": s.tariff.fuel_price_gas,
                   "curtailment_penalty": s.tariff.curtailment_penalty},
        "time": {"typical_days": [asdict(d) for d in s.time.typical_days],
                 "hours_per_day": s.time.hours_per_day,
                 "planning_horizon_years": s.time.planning_horizon_years,
                 "discount_rate": s.time.discount_rate},
        "profiles": {k: _floats(v.values) for k, v in s.profiles.items()},
    }
    if s.dsm is not None:
        d = s.dsm
        c = d.comfort
        doc["dsm"] = {
            "comfort": {"t_min": c.t_min, "t_max": c.t_max, "max_ramp": c.max_ramp, "w1": c.w1,
                        "w2": c.w2, "ep": c.ep, "occupants": _num(float(np.asarray(c.occupants)))
                        if np.ndim(c.occupants) == 0 else _floats(c.occupants)},
            "grid_step": d.grid_step, "horizon": d.horizon, "max_sweeps": d.max_sweeps,
            "chiller_cop": d.chiller_cop, "ambient": _floats(d.ambient),
            "zones": [{"zone_id": z.zone_id, "node": z.node, "beta": list(z.model.beta),
                       "residual_sigma": z.model.residual_sigma,
                       "energy_rate": _floats(z.energy_rate), "occupants": _floats(z.occupants),
                       "baseline_setpoint": _floats(z.baseline_setpoint)} for z in d.zones],
        }
    return doc


def dump_scenario(s: Scenario, path=None) -> str:
    text = json.dumps(scenario_to_dict(s), indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def bundled_path(name: str) -> str:
    return os.path.join(os.path.dirname(__file__), "data", name)
