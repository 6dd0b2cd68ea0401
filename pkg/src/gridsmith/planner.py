"""Portfolio, sizing, placement and dispatch planning for one scenario.

The objective is annualised investment plus the operating cost of one
representative year built from weighted typical days.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from . import grid, thermal
from .grid import AssemblyError, ElectricVarMap
from .model import (DiscreteTech, LoadProfile, NetworkModel, Tariff, TechnologyCatalog,
                    TimeStructure, validate_model)
from .solver import MilpProblem, ProblemBuilder, Solution, solve_milp
from .thermal import ThermalVarMap

PV_PROFILE = "pv_availability"


class PlanValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid plan inputs: " + "; ".join(self.violations))


class PlanInfeasibleError(RuntimeError):
    def __init__(self, msg, nodes=()):
        super().__init__(msg)
        self.nodes = list(nodes)


class SolverLimitError(RuntimeError):
    pass


def crf(rate: float, lifetime: float) -> float:
    """Capital recovery factor; ``1 / n`` at zero rate."""
    if lifetime < 1:
        raise ValueError("lifetime must be >= 1 year")
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if rate == 0:
        return 1.0 / lifetime
    g = (1.0 + rate) ** lifetime
    return rate * g / (g - 1.0)


def annualize(capital: float, lifetime: float, rate: float) -> float:
    """Equivalent annual cost of ``capital`` over ``lifetime`` years."""
    if capital < 0:
        raise ValueError("capital must be >= 0")
    return capital * crf(rate, lifetime)


@dataclass
class CostBreakdown:
    c_invd: float = 0.0
    c_invc: float = 0.0
    c_pur: float = 0.0
    c_dem: float = 0.0
    c_gen: float = 0.0
    c_exp: float = 0.0
    c_curt: float = 0.0  # penalty for unserved electrical load

    @property
    def investment(self) -> float:
        return self.c_invd + self.c_invc

    @property
    def operation(self) -> float:
        return self.c_pur + self.c_dem + self.c_gen - self.c_exp + self.c_curt

    @property
    def total(self) -> float:
        return self.investment + self.operation

    def as_dict(self) -> dict:
        return {"C_invd": self.c_invd, "C_invc": self.c_invc, "C_pur": self.c_pur,
                "C_dem": self.c_dem, "C_gen": self.c_gen, "C_exp": self.c_exp,
                "C_curt": self.c_curt, "investment": self.investment,
                "operation": self.operation, "total": self.total}


@dataclass
class Portfolio:
    capacity: dict  # (node, tech) -> kW (kWh for storage energy)
    units: dict  # (node, tech) -> unit count, discrete techs only

    def table(self, techs=None) -> pd.DataFrame:
        nodes = sorted({n for n, _ in self.capacity}, key=_node_key)
        techs = techs or sorted({k for _, k in self.capacity})
        data = {k: [self.capacity.get((n, k), 0.0) for n in nodes] for k in techs}
        df = pd.DataFrame(data, index=pd.Index(nodes, name="node"))
        df.loc["aggregate"] = df.sum()
        return df

    def aggregate(self, tech) -> float:
        return float(sum(v for (_, k), v in self.capacity.items() if k == tech))


def _node_key(n):
    return (0, int(n), "") if str(n).isdigit() else (1, 0, str(n))


@dataclass
class Dispatch:
    """Hourly values per typical-day slot (arrays of length ``n_slots``)."""

    imp: np.ndarray
    exp: np.ndarray
    series: dict  # (variable, node, tech) -> array; tech may be ""
    flows_pu: dict  # cable index -> array
    volts_pu: dict  # node -> array
    peaks: dict  # month -> kW

    def get(self, variable, node="", tech=""):
        return self.series.get((variable, str(node), tech))

    def to_frame(self) -> pd.DataFrame:
        recs = []
        n = self.imp.size
        hours = np.arange(n)
        blocks = [("grid", "import", self.imp), ("grid", "export", self.exp)]
        for (var, node, tech), vals in sorted(self.series.items()):
            name = f"{var}:{tech}" if tech else var
            blocks.append((node, name, vals))
        for node, vals in sorted(self.volts_pu.items()):
            blocks.append((node, "voltage_pu", vals))
        for ci, vals in sorted(self.flows_pu.items()):
            blocks.append((f"cable{ci}", "flow_pu", vals))
        for node, var, vals in blocks:
            recs.append(pd.DataFrame({"node": node, "hour": hours, "variable": var,
                                      "value": vals}))
        return pd.concat(recs, ignore_index=True)


@dataclass
class AssembledPlan:
    problem: MilpProblem
    net: NetworkModel
    catalog: TechnologyCatalog
    tariff: Tariff
    time: TimeStructure
    loads: dict  # kind -> node -> array
    pv_availability: np.ndarray
    ev: ElectricVarMap
    tv: ThermalVarMap
    units: dict  # (node, tech) -> col
    cap: dict  # (node, tech) -> col
    inst: dict
    peak: dict  # month -> col
    fingerprint: str = ""


@dataclass
class PlanResult:
    portfolio: Portfolio
    dispatch: Dispatch
    costs: CostBreakdown
    solution: Solution
    plan: Optional[AssembledPlan] = None
    label: str = ""
    fingerprint: str = ""


def _resolve_loads(net: NetworkModel, profiles: dict, n_slots: int) -> dict:
    loads = {"electrical": {}, "cooling": {}, "heating": {}}
    for b in net.buses:
        for kind, ref in b.load_refs.items():
            if ref is None:
                continue
            if ref not in profiles:
                raise AssemblyError(f"node {b.id}: {kind} profile {ref!r} missing")
            v = profiles[ref]
            v = v.values if isinstance(v, LoadProfile) else np.asarray(v, dtype=float)
            if v.size != n_slots:
                raise AssemblyError(f"node {b.id}: {kind} profile {ref!r} has {v.size} values")
            loads[kind][b.id] = v
    return loads


def _fingerprint(net, catalog, tariff, time) -> str:
    h = hashlib.sha256()
    h.update(repr((net, catalog, time)).encode())
    for arr in (tariff.energy_price, tariff.export_price):
        h.update(np.ascontiguousarray(arr).tobytes())
    h.update(repr((tariff.demand_charge, tariff.fuel_price_gas,
                   tariff.curtailment_penalty)).encode())
    return h.hexdigest()[:16]


_KIND_GROUP = {"pv": "gen", "ess": "ess", "electric_chiller": "chiller",
               "absorption_chiller": "absorption", "boiler": "boiler",
               "heat_storage": "heat_storage", "cold_storage": "cold_storage"}


def assemble_plan_milp(model: NetworkModel, catalog: TechnologyCatalog, tariff: Tariff,
                       time: TimeStructure, profiles: dict, voltage_band: bool = True,
                       validate: bool = True) -> AssembledPlan:
    """Build the plan MILP for one scenario."""
    if validate:
        load_profiles = {k: v for k, v in profiles.items()}
        violations = validate_model(model, catalog, tariff, time, load_profiles)
        if violations:
            raise PlanValidationError(violations)
    T = time.n_slots
    loads = _resolve_loads(model, profiles, T)
    w = time.slot_weights
    r = time.discount_rate
    b = ProblemBuilder()

    node_techs: dict = {}
    units, cap, inst = {}, {}, {}
    chp_nodes = set()
    has_pv = False
    for bus in model.buses:
        groups: dict = {}
        for k in bus.candidate_techs:
            tech = catalog.get(k)
            if isinstance(tech, DiscreteTech):
                groups.setdefault("gen", []).append(k)
                cost = annualize(tech.unit_capacity_kw * tech.capital_cost_per_kw,
                                 tech.lifetime_years, r)
                units[bus.id, k] = b.add_var(f"units[{bus.id},{k}]", 0, tech.max_units, cost,
                                             "integer")
                chp_nodes.add(bus.id)
            else:
                groups.setdefault(_KIND_GROUP[tech.kind], []).append(k)
                has_pv |= tech.kind == "pv"
                cost = annualize(tech.variable_cost_per_kw, tech.lifetime_years, r)
                cap[bus.id, k] = b.add_var(f"cap[{bus.id},{k}]", 0, tech.max_capacity_kw, cost)
                if tech.fixed_cost > 0:
                    inst[bus.id, k] = b.add_var(
                        f"inst[{bus.id},{k}]", 0, 1,
                        annualize(tech.fixed_cost, tech.lifetime_years, r), "binary")
                    b.add_row([(cap[bus.id, k], 1.0), (inst[bus.id, k], -tech.max_capacity_kw)],
                              "<=", 0.0, f"gate[{bus.id},{k}]")
        node_techs[bus.id] = groups
    pv_avail = np.zeros(T)
    if has_pv:
        if PV_PROFILE not in profiles:
            raise AssemblyError(f"PV candidates need a {PV_PROFILE!r} profile")
        pv_avail = np.asarray(getattr(profiles[PV_PROFILE], "values", profiles[PV_PROFILE]),
                              dtype=float)

    ev = grid.register_electric_vars(b, model, T, node_techs, loads["electrical"], voltage_band)
    tv = thermal.register_thermal_vars(b, model, T, node_techs, chp_nodes)

    # operating costs
    for t in range(T):
        b.add_cost(ev.imp[t], w[t] * tariff.energy_price[t])
        b.add_cost(ev.exp[t], -w[t] * tariff.export_price[t])
    for (n, k), cols in ev.gen.items():
        tech = catalog.get(k)
        if isinstance(tech, DiscreteTech):
            fuel = tariff.fuel_price_gas if tech.fuel_price is None else tech.fuel_price
            per_kwh = fuel / tech.electrical_efficiency + tech.om_cost_per_kwh
            for t in range(T):
                b.add_cost(cols[t], w[t] * per_kwh)
    for (n, k), cols in tv.boiler.items():
        per_kwh = tariff.fuel_price_gas / catalog.get(k).efficiency
        for t in range(T):
            b.add_cost(cols[t], w[t] * per_kwh)
    for n, cols in ev.curtail.items():
        for t in range(T):
            b.add_cost(cols[t], w[t] * tariff.curtailment_penalty)
    peak = {}
    if tariff.demand_charge > 0:
        for m in time.months:
            peak[m] = b.add_var(f"peak[{m}]", 0, np.inf, tariff.demand_charge)
        for kday, day in enumerate(time.typical_days):
            for t in time.slots_of_day(kday):
                b.add_row([(ev.imp[t], 1.0), (peak[day.month], -1.0)], "<=", 0.0,
                          f"peakdef[{t}]")

    # capacity rows
    for (n, k), cols in ev.gen.items():
        tech = catalog.get(k)
        for t in range(T):
            if isinstance(tech, DiscreteTech):
                b.add_row([(cols[t], 1.0), (units[n, k], -tech.unit_capacity_kw)], "<=", 0.0)
            else:
                b.add_row([(cols[t], 1.0), (cap[n, k], -pv_avail[t])], "<=", 0.0)
    cops = {}
    for (n, k), cols in list(ev.chiller_draw.items()) + list(tv.absorption_draw.items()):
        cop = catalog.get(k).cop
        cops[k] = cop
        for t in range(T):
            b.add_row([(cols[t], cop), (cap[n, k], -1.0)], "<=", 0.0)
    for (n, k), cols in tv.boiler.items():
        for t in range(T):
            b.add_row([(cols[t], 1.0), (cap[n, k], -1.0)], "<=", 0.0)
    for (n, k), soc in tv.soc.items():
        tech = catalog.get(k)
        if tech.kind == "ess":
            ch, dis = ev.charge[n, k], ev.discharge[n, k]
        elif tech.kind == "heat_storage":
            ch, dis = tv.heat_charge[n, k], tv.heat_discharge[n, k]
        else:
            ch, dis = tv.cold_charge[n, k], tv.cold_discharge[n, k]
        thermal.emit_storage_dynamics(b, ch, dis, soc, cap[n, k], tech, time, f"[{n},{k}]")

    hpr = {t.id: t.heat_to_power_ratio for t in catalog.discrete}
    chp_gen = {key: cols for key, cols in ev.gen.items() if key[1] in hpr}
    for t in range(T):
        grid.emit_power_balance(b, model, ev, loads["electrical"], t)
        grid.emit_voltage_rows(b, model, ev, t)
        grid.emit_ampacity_rows(b, model, ev, t)
        thermal.emit_heat_balance(b, model, tv, chp_gen, hpr, loads["heating"], t)
        thermal.emit_cooling_balance(b, model, tv, ev.chiller_draw, cops, loads["cooling"], t)

    return AssembledPlan(b.build(), model, catalog, tariff, time, loads, pv_avail, ev, tv,
                         units, cap, inst, peak, _fingerprint(model, catalog, tariff, time))


def _take(x, cols):
    return np.asarray(x)[np.asarray(cols)]


def extract(plan: AssembledPlan, x: np.ndarray) -> tuple[Portfolio, Dispatch]:
    capacity, units = {}, {}
    for (n, k), j in plan.units.items():
        u = float(np.round(x[j]))
        units[n, k] = int(u)
        capacity[n, k] = u * plan.catalog.get(k).unit_capacity_kw
    for (n, k), j in plan.cap.items():
        capacity[n, k] = float(x[j])
    ev, tv = plan.ev, plan.tv
    series = {}
    for name, d in (("gen", ev.gen), ("charge", ev.charge), ("discharge", ev.discharge),
                    ("chiller_draw", ev.chiller_draw), ("boiler", tv.boiler),
                    ("heat_charge", tv.heat_charge), ("heat_discharge", tv.heat_discharge),
                    ("cold_charge", tv.cold_charge), ("cold_discharge", tv.cold_discharge),
                    ("absorption_draw", tv.absorption_draw), ("soc", tv.soc)):
        for (n, k), cols in d.items():
            series[name, n, k] = _take(x, cols)
    for n, cols in ev.curtail.items():
        series["curtail", n, ""] = _take(x, cols)
    for n, cols in tv.vent.items():
        series["vent", n, ""] = _take(x, cols)
    for (ci, d), cols in tv.heat_flow.items():
        series["heat_flow", f"cable{ci}", "fwd" if d == 1 else "rev"] = _take(x, cols)
    for kind in ("electrical", "cooling", "heating"):
        for n, v in plan.loads[kind].items():
            series[f"load_{kind}", n, ""] = np.asarray(v, dtype=float)
    dispatch = Dispatch(_take(x, ev.imp), _take(x, ev.exp), series,
                        {ci: _take(x, c) for ci, c in ev.flow.items()},
                        {n: _take(x, c) for n, c in ev.volt.items()},
                        {m: float(x[j]) for m, j in plan.peak.items()})
    return Portfolio(capacity, units), dispatch


def recompute_costs(portfolio: Portfolio, dispatch: Dispatch, installed: dict,
                    catalog: TechnologyCatalog, tariff: Tariff, time: TimeStructure) -> CostBreakdown:
    """Cost components from extracted results only.

    ``installed`` maps ``(node, tech)`` to the installation indicator for
    technologies that carry a fixed cost.
    """
    r = time.discount_rate
    w = time.slot_weights
    c = CostBreakdown()
    for (n, k), kw in portfolio.capacity.items():
        tech = catalog.get(k)
        if isinstance(tech, DiscreteTech):
            c.c_invd += portfolio.units[n, k] * annualize(
                tech.unit_capacity_kw * tech.capital_cost_per_kw, tech.lifetime_years, r)
        else:
            c.c_invc += kw * annualize(tech.variable_cost_per_kw, tech.lifetime_years, r)
            if tech.fixed_cost > 0:
                c.c_invc += installed.get((n, k), 0.0) * annualize(
                    tech.fixed_cost, tech.lifetime_years, r)
    c.c_pur = float(np.sum(w * tariff.energy_price * dispatch.imp))
    c.c_exp = float(np.sum(w * tariff.export_price * dispatch.exp))
    c.c_dem = tariff.demand_charge * float(sum(dispatch.peaks.values()))
    for (var, n, k), vals in dispatch.series.items():
        if var == "gen":
            tech = catalog.get(k)
            if isinstance(tech, DiscreteTech):
                fuel = tariff.fuel_price_gas if tech.fuel_price is None else tech.fuel_price
                c.c_gen += float(np.sum(w * vals)) * (fuel / tech.electrical_efficiency
                                                      + tech.om_cost_per_kwh)
        elif var == "boiler":
            c.c_gen += float(np.sum(w * vals)) * tariff.fuel_price_gas / catalog.get(k).efficiency
        elif var == "curtail":
            c.c_curt += float(np.sum(w * vals)) * tariff.curtailment_penalty
    return c


def diagnose_infeasible(plan: AssembledPlan) -> list[str]:
    """Nodes whose thermal peak exceeds the largest supply the candidates allow."""
    out = []
    cat = plan.catalog
    for n, load in plan.loads["cooling"].items():
        supply = 0.0
        for k in plan.net.bus(n).candidate_techs:
            tech = cat.get(k)
            if getattr(tech, "kind", None) in ("electric_chiller", "absorption_chiller"):
                supply += tech.max_capacity_kw
            elif getattr(tech, "kind", None) == "cold_storage":
                supply += tech.power_ratio * tech.max_capacity_kw
        if load.max() > supply + 1e-9:
            out.append(n)
    for n, load in plan.loads["heating"].items():
        if load.max() > 0 and not plan.net.cables and n not in {k[0] for k in plan.tv.boiler}:
            out.append(n)
    return sorted(set(out), key=_node_key)


def solve_plan(plan: AssembledPlan, rel_gap: float = 1e-6, node_limit: int = 10_000,
               backend: str = "auto", label: str = "") -> PlanResult:
    """Solve the assembled MILP and extract portfolio, dispatch and costs."""
    sol = solve_milp(plan.problem, rel_gap=rel_gap, node_limit=node_limit, backend=backend)
    if sol.status == "infeasible":
        nodes = diagnose_infeasible(plan)
        detail = f"; thermal supply cannot cover peak at nodes {', '.join(nodes)}" if nodes else ""
        raise PlanInfeasibleError(f"plan is infeasible{detail}", nodes)
    if sol.x is None:
        raise SolverLimitError(f"solver stopped with status {sol.status} and no incumbent")
    portfolio, dispatch = extract(plan, sol.x)
    installed = {key: float(np.round(sol.x[j])) for key, j in plan.inst.items()}
    costs = recompute_costs(portfolio, dispatch, installed, plan.catalog, plan.tariff, plan.time)
    if abs(costs.total - sol.objective) > 1e-6 * max(1.0, abs(sol.objective)):
        raise AssertionError(f"cost re-evaluation {costs.total} != solver objective "
                             f"{sol.objective}")
    return PlanResult(portfolio, dispatch, costs, sol, plan, label, plan.fingerprint)


@dataclass
class ScenarioComparison:
    rows: dict = field(default_factory=dict)  # component -> (a, b, delta, pct reduction)

    def reduction(self, component="total") -> float:
        return self.rows[component][3]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([(k, *v) for k, v in self.rows.items()],
                            columns=["component", "a", "b", "delta", "reduction_pct"])


def compare_scenarios(a, b, check_config: bool = True) -> ScenarioComparison:
    """Per-component deltas and percentage reduction ``(a - b) / a``.

    ``a`` and ``b`` are :class:`PlanResult` or :class:`CostBreakdown`-like
    objects exposing ``investment``, ``operation`` and ``total``.
    """
    if isinstance(a, PlanResult) and isinstance(b, PlanResult):
        if check_config and a.fingerprint and b.fingerprint and a.fingerprint != b.fingerprint:
            raise ValueError("scenarios were planned on different network/catalog/tariff/time")
    ca = a.costs if isinstance(a, PlanResult) else a
    cb = b.costs if isinstance(b, PlanResult) else b
    names = ["investment", "operation", "total"]
    if isinstance(ca, CostBreakdown) and isinstance(cb, CostBreakdown):
        names = list(ca.as_dict())
    rows = {}
    for name in names:
        va = ca.as_dict()[name] if isinstance(ca, CostBreakdown) else getattr(ca, name)
        vb = cb.as_dict()[name] if isinstance(cb, CostBreakdown) else getattr(cb, name)
        pct = 100.0 * (va - vb) / va if va != 0 else 0.0
        rows[name] = (float(va), float(vb), float(vb - va), float(pct))
    return ScenarioComparison(rows)
