"""Heat and cooling rows of the plan model, plus storage dynamics.

Heat links share the route of cables flagged ``carries_heat`` and lose a
fixed fraction ``heat_loss_per_m * length_m`` of what is sent.  Cooling is
balanced locally at each node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import AssemblyError
from .model import ContinuousTech, NetworkModel, TimeStructure


@dataclass
class ThermalVarMap:
    boiler: dict = field(default_factory=dict)  # (node, tech) -> cols, heat output
    heat_charge: dict = field(default_factory=dict)
    heat_discharge: dict = field(default_factory=dict)
    cold_charge: dict = field(default_factory=dict)
    cold_discharge: dict = field(default_factory=dict)
    absorption_draw: dict = field(default_factory=dict)  # (node, tech) -> heat input cols
    vent: dict = field(default_factory=dict)  # node -> unused recovered heat
    heat_flow: dict = field(default_factory=dict)  # (cable index, +1|-1) -> cols
    soc: dict = field(default_factory=dict)  # (node, tech) -> cols, every storage kind


def register_thermal_vars(builder, net: NetworkModel, n_slots: int, node_techs: dict,
                          chp_nodes) -> ThermalVarMap:
    tv = ThermalVarMap()
    T = range(n_slots)

    def cols(tag, node, k):
        return np.array([builder.add_var(f"{tag}[{node},{k},{t}]") for t in T])

    for b in net.buses:
        techs = node_techs.get(b.id, {})
        for k in techs.get("boiler", []):
            tv.boiler[b.id, k] = cols("boil", b.id, k)
        for k in techs.get("heat_storage", []):
            tv.heat_charge[b.id, k] = cols("hch", b.id, k)
            tv.heat_discharge[b.id, k] = cols("hdis", b.id, k)
        for k in techs.get("cold_storage", []):
            tv.cold_charge[b.id, k] = cols("cch", b.id, k)
            tv.cold_discharge[b.id, k] = cols("cdis", b.id, k)
        for k in techs.get("absorption", []):
            tv.absorption_draw[b.id, k] = cols("absdraw", b.id, k)
        for k in techs.get("ess", []) + techs.get("heat_storage", []) + techs.get("cold_storage", []):
            tv.soc[b.id, k] = cols("soc", b.id, k)
        if b.id in chp_nodes:
            tv.vent[b.id] = np.array([builder.add_var(f"vent[{b.id},{t}]") for t in T])
    for ci, c in enumerate(net.cables):
        if c.carries_heat:
            for d, tag in ((1, "fwd"), (-1, "rev")):
                tv.heat_flow[ci, d] = np.array(
                    [builder.add_var(f"heat[{c.from_bus}-{c.to_bus},{tag},{t}]") for t in T])
    return tv


def _node_cols(d, node, hour):
    return [cols[hour] for (n, _), cols in d.items() if n == node]


def emit_heat_balance(builder, net: NetworkModel, tv: ThermalVarMap, chp_gen: dict,
                      hpr: dict, heat_loads: dict, hour: int) -> list[int]:
    """Heat balance per node.

    ``chp_gen`` maps ``(node, tech)`` to electric generation columns and
    ``hpr`` maps tech id to its heat-to-power ratio; recovered heat is
    ``hpr * generation``.
    """
    for c in net.cables:
        if c.carries_heat and c.heat_loss < 0:
            raise AssemblyError(f"negative heat loss on link {c.from_bus}-{c.to_bus}")
    rows = []
    for b in net.buses:
        load = heat_loads.get(b.id)
        demand = 0.0 if load is None else float(load[hour])
        coeffs = []
        for (n, k), cols in chp_gen.items():
            if n == b.id:
                coeffs.append((cols[hour], hpr[k]))
        coeffs += [(j, 1.0) for j in _node_cols(tv.boiler, b.id, hour)]
        coeffs += [(j, 1.0) for j in _node_cols(tv.heat_discharge, b.id, hour)]
        coeffs += [(j, -1.0) for j in _node_cols(tv.heat_charge, b.id, hour)]
        coeffs += [(j, -1.0) for j in _node_cols(tv.absorption_draw, b.id, hour)]
        if b.id in tv.vent:
            coeffs.append((tv.vent[b.id][hour], -1.0))
        for (ci, d), cols in tv.heat_flow.items():
            c = net.cables[ci]
            src, dst = (c.from_bus, c.to_bus) if d == 1 else (c.to_bus, c.from_bus)
            if src == b.id:
                coeffs.append((cols[hour], -1.0))
            elif dst == b.id:
                coeffs.append((cols[hour], 1.0 - c.heat_loss))
        if not coeffs and demand == 0.0:
            continue
        # sources - sinks = heat load
        rows.append(builder.add_row(coeffs, "=", demand, f"hbal[{b.id},{hour}]"))
    return rows


def emit_cooling_balance(builder, net: NetworkModel, tv: ThermalVarMap, chiller_draw: dict,
                         cops: dict, cool_loads: dict, hour: int) -> list[int]:
    """Cooling balance per node: chillers and cold storage meet the cooling load."""
    rows = []
    for b in net.buses:
        load = cool_loads.get(b.id)
        demand = 0.0 if load is None else float(load[hour])
        coeffs = []
        for (n, k), cols in list(chiller_draw.items()) + list(tv.absorption_draw.items()):
            if n != b.id:
                continue
            cop = cops.get(k)
            if cop is None or not cop > 0:
                raise AssemblyError(f"missing COP for chiller {k} at node {b.id}")
            coeffs.append((cols[hour], cop))
        coeffs += [(j, 1.0) for j in _node_cols(tv.cold_discharge, b.id, hour)]
        coeffs += [(j, -1.0) for j in _node_cols(tv.cold_charge, b.id, hour)]
        if not coeffs and demand == 0.0:
            continue
        rows.append(builder.add_row(coeffs, "=", demand, f"cbal[{b.id},{hour}]"))
    return rows


def emit_storage_dynamics(builder, charge, discharge, soc, cap_col, tech: ContinuousTech,
                          time: TimeStructure, tag: str = "") -> list[int]:
    """State-of-charge recursion, cyclic within every typical day, plus capacity rows.

    ``SOC[h] = (1 - decay) SOC[h-1] + eta_c charge[h] - discharge[h] / eta_d`` with
    ``SOC[-1] = SOC[23]``; ``SOC <= cap``; ``charge, discharge <= power_ratio * cap``.
    """
    rows = []
    keep = 1.0 - tech.decay_per_hour
    for k in range(time.n_days):
        slots = list(time.slots_of_day(k))
        for i, t in enumerate(slots):
            prev = slots[i - 1]
            coeffs = [(soc[t], 1.0), (charge[t], -tech.eta_charge),
                      (discharge[t], 1.0 / tech.eta_discharge)]
            if prev == t:
                coeffs[0] = (soc[t], 1.0 - keep)
            else:
                coeffs.append((soc[prev], -keep))
            rows.append(builder.add_row(coeffs, "=", 0.0, f"soc{tag}[{t}]"))
    for t in range(time.n_slots):
        if cap_col is not None:
            rows.append(builder.add_row([(soc[t], 1.0), (cap_col, -1.0)], "<=", 0.0))
            rows.append(builder.add_row([(charge[t], 1.0), (cap_col, -tech.power_ratio)], "<=", 0.0))
            rows.append(builder.add_row([(discharge[t], 1.0), (cap_col, -tech.power_ratio)], "<=", 0.0))
    return rows
