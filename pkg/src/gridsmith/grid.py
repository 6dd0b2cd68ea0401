"""Electrical rows of the plan model: node balance, voltages, cable limits.

Power quantities are kW columns; cable flows and voltages are per-unit
columns.  Node balances are written in per-unit on the network power base.
Line losses are not modelled; voltage drop along a cable is linear in its
active-power flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import NetworkModel


class AssemblyError(ValueError):
    """Inputs cannot be turned into constraint rows."""


@dataclass
class ElectricVarMap:
    """Column indices; each value is an int array with one entry per hour slot."""

    imp: np.ndarray = None
    exp: np.ndarray = None
    gen: dict = field(default_factory=dict)  # (node, tech) -> cols
    charge: dict = field(default_factory=dict)  # (node, tech) -> cols, ESS only
    discharge: dict = field(default_factory=dict)
    curtail: dict = field(default_factory=dict)  # node -> cols
    chiller_draw: dict = field(default_factory=dict)  # (node, tech) -> cols, electric input
    flow: dict = field(default_factory=dict)  # cable index -> cols (pu, from -> to)
    volt: dict = field(default_factory=dict)  # node -> cols (pu)

    def all_columns(self) -> np.ndarray:
        parts = [self.imp, self.exp]
        for d in (self.gen, self.charge, self.discharge, self.curtail, self.chiller_draw,
                  self.flow, self.volt):
            parts.extend(d.values())
        return np.concatenate([p for p in parts if p is not None])


def register_electric_vars(builder, net: NetworkModel, n_slots: int, node_techs: dict,
                           loads: dict, voltage_band: bool = True) -> ElectricVarMap:
    """Create electrical columns.

    ``node_techs`` maps node id to ``{"gen": [...], "ess": [...], "chiller": [...]}``
    technology id lists; ``loads`` maps node id to its electrical load array.
    """
    vm = ElectricVarMap()
    T = range(n_slots)
    s = net.slack_bus
    vm.imp = np.array([builder.add_var(f"imp[{t}]") for t in T])
    vm.exp = np.array([builder.add_var(f"exp[{t}]") for t in T])
    for b in net.buses:
        techs = node_techs.get(b.id, {})
        for k in techs.get("gen", []):
            vm.gen[b.id, k] = np.array([builder.add_var(f"gen[{b.id},{k},{t}]") for t in T])
        for k in techs.get("ess", []):
            vm.charge[b.id, k] = np.array([builder.add_var(f"ch[{b.id},{k},{t}]") for t in T])
            vm.discharge[b.id, k] = np.array([builder.add_var(f"dis[{b.id},{k},{t}]") for t in T])
        for k in techs.get("chiller", []):
            vm.chiller_draw[b.id, k] = np.array(
                [builder.add_var(f"ecdraw[{b.id},{k},{t}]") for t in T])
        load = loads.get(b.id)
        if load is not None and np.any(np.asarray(load) > 0):
            vm.curtail[b.id] = np.array(
                [builder.add_var(f"curt[{b.id},{t}]", 0.0, float(load[t])) for t in T])
        if b.id == s:
            vm.volt[b.id] = np.array([builder.add_var(f"v[{b.id},{t}]", 1.0, 1.0) for t in T])
        else:
            lo, hi = (net.v_min, net.v_max) if voltage_band else (-np.inf, np.inf)
            vm.volt[b.id] = np.array([builder.add_var(f"v[{b.id},{t}]", lo, hi) for t in T])
    for ci, c in enumerate(net.cables):
        vm.flow[ci] = np.array([builder.add_var(f"flow[{c.from_bus}-{c.to_bus},{t}]",
                                                -np.inf, np.inf) for t in T])
    return vm


def emit_power_balance(builder, net: NetworkModel, vm: ElectricVarMap, loads: dict,
                       hour: int) -> list[int]:
    """One row per bus: local injections minus load equal net cable outflow."""
    rows = []
    inv = 1.0 / net.base_power_kva
    for b in net.buses:
        if b.electrical_load is not None and b.id not in loads:
            raise AssemblyError(f"missing electrical profile for node {b.id}, hour {hour}")
        load = loads.get(b.id)
        demand = 0.0 if load is None else float(load[hour])
        coeffs = []
        if b.id == net.slack_bus:
            coeffs += [(vm.imp[hour], inv), (vm.exp[hour], -inv)]
        for (n, _), cols in vm.gen.items():
            if n == b.id:
                coeffs.append((cols[hour], inv))
        for (n, _), cols in vm.discharge.items():
            if n == b.id:
                coeffs.append((cols[hour], inv))
        for (n, _), cols in vm.charge.items():
            if n == b.id:
                coeffs.append((cols[hour], -inv))
        for (n, _), cols in vm.chiller_draw.items():
            if n == b.id:
                coeffs.append((cols[hour], -inv))
        if b.id in vm.curtail:
            coeffs.append((vm.curtail[b.id][hour], inv))
        for ci, c in enumerate(net.cables):
            if c.from_bus == b.id:
                coeffs.append((vm.flow[ci][hour], -1.0))
            elif c.to_bus == b.id:
                coeffs.append((vm.flow[ci][hour], 1.0))
        rows.append(builder.add_row(coeffs, "=", demand * inv, f"pbal[{b.id},{hour}]"))
    return rows


def emit_voltage_rows(builder, net: NetworkModel, vm: ElectricVarMap, hour: int) -> list[int]:
    """``V_to = V_from - r * flow`` per cable; the band lives in the voltage bounds."""
    rows = []
    for ci, c in enumerate(net.cables):
        coeffs = [(vm.volt[c.to_bus][hour], 1.0), (vm.volt[c.from_bus][hour], -1.0),
                  (vm.flow[ci][hour], c.resistance_pu)]
        rows.append(builder.add_row(coeffs, "=", 0.0, f"vdrop[{ci},{hour}]"))
    return rows


def emit_ampacity_rows(builder, net: NetworkModel, vm: ElectricVarMap, hour: int) -> list[int]:
    """``-amp <= flow <= amp`` as two rows per cable."""
    rows = []
    for ci, c in enumerate(net.cables):
        f = vm.flow[ci][hour]
        rows.append(builder.add_row([(f, 1.0)], "<=", c.ampacity_pu, f"amp+[{ci},{hour}]"))
        rows.append(builder.add_row([(f, -1.0)], "<=", c.ampacity_pu, f"amp-[{ci},{hour}]"))
    return rows


def voltage_drop(cable, flow_pu: float) -> float:
    return cable.resistance_pu * flow_pu
