"""Receding-horizon setpoint control over a typical-day year.

Optimised cooling profiles are obtained by scaling each node's baseline
cooling load by the ratio of predicted zone cooling energy under optimised
and baseline (setback) setpoints, summed over each typical day.  An hourly
ratio is ill-conditioned: setback hours have almost no predicted baseline
energy, and small absolute changes there would multiply large node loads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from ..model import LoadProfile, Tariff, TimeStructure
from .regression import ZoneThermalModel
from .setpoint import ComfortSpec, InfeasibleSetpointError, SetpointOptimizer


def hour_class(hour: int) -> int:
    """Categorical time-of-day code: night, morning, afternoon, evening."""
    return int(hour % 24) // 6


@dataclass(frozen=True)
class ZoneConfig:
    zone_id: str
    node: str
    model: ZoneThermalModel
    energy_rate: np.ndarray  # kW, one value per slot
    occupants: np.ndarray  # count per slot
    baseline_setpoint: np.ndarray  # degC per slot (setback schedule)


@dataclass(frozen=True)
class DsmConfig:
    zones: tuple
    ambient: np.ndarray  # degC per slot
    comfort: ComfortSpec = ComfortSpec()
    grid_step: float = 0.5
    horizon: int = 6
    max_sweeps: int = 20
    chiller_cop: float = 3.0

    def nodes(self) -> list[str]:
        return sorted({z.node for z in self.zones})

    def zones_at(self, node) -> list[ZoneConfig]:
        return sorted((z for z in self.zones if z.node == node), key=lambda z: z.zone_id)


@dataclass
class DsmResult:
    cooling: dict  # node -> LoadProfile (kW_th)
    chiller_electric: dict  # node -> LoadProfile (kW)
    setpoints: dict  # zone -> array per slot
    ase_optimized: dict  # zone -> array per slot (kWh)
    ase_baseline: dict
    max_sweeps_used: int = 0
    sweep_histories: list = field(default_factory=list)


def _zone_comfort(cfg: DsmConfig, z: ZoneConfig, slots) -> ComfortSpec:
    c = cfg.comfort
    return ComfortSpec(c.t_min, c.t_max, c.max_ramp, c.w1, c.w2, c.ep,
                       occupants=np.asarray(z.occupants, dtype=float)[slots])


def _simulate_day(cfg: DsmConfig, zones, prices, day_slots, optimizer, schedule=None):
    """Run one typical day; ``schedule`` fixes setpoints (baseline) instead of optimising."""
    hours = len(day_slots)
    mid = cfg.comfort.midpoint
    temps = {z.zone_id: [mid, mid, mid] for z in zones}  # oldest first
    chosen = {z.zone_id: np.zeros(hours) for z in zones}
    sweeps_used = 0
    histories = []
    for h in range(hours):
        slots = day_slots[h:h + min(cfg.horizon, hours - h)]
        H = len(slots)
        states = {}
        for z in zones:
            hist = temps[z.zone_id]
            states[z.zone_id] = {"temp_history": (hist[-1], hist[-2], hist[-3]),
                                 "energy_rate": z.energy_rate[slots],
                                 "ambient": cfg.ambient[slots],
                                 "time_of_day": np.array([hour_class(s) for s in slots], float)}
        if schedule is None:
            models = {z.zone_id: z.model for z in zones}
            comfort = {z.zone_id: _zone_comfort(cfg, z, slots) for z in zones}
            try:
                plan = optimizer.optimize(models, states, comfort, prices[slots], horizon=H)
            except InfeasibleSetpointError as err:
                raise InfeasibleSetpointError(f"hour slot {day_slots[h]}: {err}", zone=err.zone,
                                              hour=int(day_slots[h])) from err
            sweeps_used = max(sweeps_used, plan.sweeps)
            histories.append(plan.objective_history)
            first = {zid: plan.setpoints[zid][0] for zid in plan.setpoints}
        else:
            first = {z.zone_id: float(schedule[z.zone_id][day_slots[h]]) for z in zones}
        for z in zones:
            chosen[z.zone_id][h] = first[z.zone_id]
            temps[z.zone_id].append(first[z.zone_id])
    # cooling energy realised along the applied trajectory
    ase = {}
    for z in zones:
        T = chosen[z.zone_id]
        full = np.concatenate([[mid, mid, mid], T])
        others = sum(chosen[o.zone_id] for o in zones if o.zone_id != z.zone_id) + np.zeros(hours)
        b = z.model.beta
        tau = np.array([hour_class(s) for s in day_slots], float)
        lin = (b[0] + b[1] * z.energy_rate[day_slots] + b[2] * cfg.ambient[day_slots]
               + b[3] * T + b[4] * full[2:2 + hours] + b[5] * full[1:1 + hours]
               + b[6] * full[0:hours] + b[7] * tau + b[8] * others)
        ase[z.zone_id] = np.maximum(lin, 0.0)
    return chosen, ase, sweeps_used, histories


def build_annual_profiles(cfg: DsmConfig, tariff: Tariff, time: TimeStructure,
                          baseline: Mapping[str, LoadProfile],
                          optimizer: Optional[SetpointOptimizer] = None) -> DsmResult:
    """Optimised cooling and chiller-electric profiles for every DSM node.

    ``baseline`` maps node id to its baseline cooling profile (kW_th).  Nodes
    without zones keep their baseline unchanged.
    """
    optimizer = optimizer or SetpointOptimizer(cfg.grid_step, cfg.horizon, cfg.max_sweeps)
    prices = np.asarray(tariff.energy_price, dtype=float)
    n = time.n_slots
    setpoints = {z.zone_id: np.zeros(n) for z in cfg.zones}
    ase_opt = {z.zone_id: np.zeros(n) for z in cfg.zones}
    ase_base = {z.zone_id: np.zeros(n) for z in cfg.zones}
    sweeps = 0
    histories = []
    base_sched = {z.zone_id: np.asarray(z.baseline_setpoint, float) for z in cfg.zones}
    for node in cfg.nodes():
        zones = cfg.zones_at(node)
        for k in range(time.n_days):
            day = np.array(time.slots_of_day(k))
            chosen, ase, sw, hist = _simulate_day(cfg, zones, prices, day, optimizer)
            _, ase_b, _, _ = _simulate_day(cfg, zones, prices, day, optimizer, base_sched)
            sweeps = max(sweeps, sw)
            histories.extend(hist)
            for z in zones:
                setpoints[z.zone_id][day] = chosen[z.zone_id]
                ase_opt[z.zone_id][day] = ase[z.zone_id]
                ase_base[z.zone_id][day] = ase_b[z.zone_id]
    cooling = {}
    electric = {}
    days = time.n_days
    for node, prof in baseline.items():
        base_vals = prof.values if isinstance(prof, LoadProfile) else np.asarray(prof, float)
        zones = cfg.zones_at(node)
        if zones:
            num = sum(ase_opt[z.zone_id] for z in zones).reshape(days, -1).sum(axis=1)
            den = sum(ase_base[z.zone_id] for z in zones).reshape(days, -1).sum(axis=1)
            ratio = np.where(den > 1e-9, num / np.where(den > 1e-9, den, 1.0), 1.0)
            vals = base_vals * np.repeat(ratio, time.hours_per_day)
        else:
            vals = base_vals.copy()
        cooling[node] = LoadProfile(vals, "kW_th")
        electric[node] = LoadProfile(vals / cfg.chiller_cop, "kW")
    return DsmResult(cooling, electric, setpoints, ase_opt, ase_base, sweeps, histories)
