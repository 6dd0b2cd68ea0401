"""The bundled 5-node case: slack bus plus two offices and two apartments.

Load targets per node are the annual usage / peak pairs of the reference
case (baseline control).  Profiles are synthesised from the bundled shapes;
cable lengths, CHP heat-to-power ratios, chiller data, tariff and the zone
regression coefficients are assumptions of this fixture.
"""

from __future__ import annotations


# node -> (building, electrical (MWh, kW), cooling (MWh_th, kW_th)) per case
LOAD_TARGETS = {
    "1": ("office", {1: (1819, 446), 2: (1819, 446)}, {1: (12958, 2442), 2: (11223, 2088)}),
    "2": ("apartment", {1: (1399, 297), 2: (1399, 297)}, {1: (1497, 815), 2: (1293, 688)}),
    "3": ("office", {1: (1450, 452), 2: (1450, 452)}, {1: (2055, 1196), 2: (1752, 1006)}),
    "4": ("apartment", {1: (644, 211), 2: (644, 211)}, {1: (233, 622), 2: (202, 533)}),
}

CABLE_LENGTH_M = 200.0
TECHS = ["CHP_MT", "CHP_FC", "PV", "ESS", "EC", "AC"]

CATALOG = {
    "discrete": [
        {"id": "CHP_MT", "unit_capacity_kw": 2000.0, "capital_cost_per_kw": 3500.0,
         "lifetime_years": 25, "electrical_efficiency": 0.41, "heat_to_power_ratio": 1.2,
         "max_units": 1},
        {"id": "CHP_FC", "unit_capacity_kw": 1000.0, "capital_cost_per_kw": 4000.0,
         "lifetime_years": 25, "electrical_efficiency": 0.37, "heat_to_power_ratio": 1.0,
         "max_units": 1},
    ],
    "continuous": [
        {"id": "PV", "kind": "pv", "fixed_cost": 3000.0, "variable_cost_per_kw": 2000.0,
         "lifetime_years": 25, "max_capacity_kw": 1500.0},
        {"id": "ESS", "kind": "ess", "fixed_cost": 600.0, "variable_cost_per_kw": 500.0,
         "lifetime_years": 6, "eta_charge": 0.95, "eta_discharge": 0.95,
         "decay_per_hour": 0.001, "power_ratio": 0.5, "max_capacity_kw": 2000.0},
        {"id": "EC", "kind": "electric_chiller", "fixed_cost": 0.0, "variable_cost_per_kw": 50.0,
         "lifetime_years": 20, "cop": 3.0, "max_capacity_kw": 5000.0},
        {"id": "AC", "kind": "absorption_chiller", "fixed_cost": 0.0,
         "variable_cost_per_kw": 150.0, "lifetime_years": 20, "cop": 0.7,
         "max_capacity_kw": 5000.0},
    ],
}

# zone regression coefficients: intercept, E_rate, T_inf, T, T_lag1..3, tau, other_sum
OFFICE_BETA = [10.0, 0.8, 1.2, -3.0, 0.9, 0.4, 0.2, 0.6, -0.3]
APARTMENT_BETA = [4.0, 0.9, 0.6, -1.6, 0.5, 0.2, 0.1, 0.3, -0.15]


def _day(values_by_hour):
    return [float(v) for v in values_by_hour]


def _office_zone(zone_id, node, scale):
    occ = [120.0 * scale if 8 <= h < 18 else 0.0 for h in range(24)]
    gains = [20.0 * scale if 8 <= h < 18 else 5.0 * scale for h in range(24)]
    base = [22.0 if 7 <= h < 18 else 26.0 for h in range(24)]
    return {"zone_id": zone_id, "node": node, "beta": OFFICE_BETA, "residual_sigma": 0.0,
            "energy_rate": _day(gains), "occupants": _day(occ), "baseline_setpoint": _day(base)}


def _apartment_zone(zone_id, node, scale):
    home = [h >= 17 or h < 8 for h in range(24)]
    occ = [44.0 * scale if at else 0.0 for at in home]
    gains = [8.0 * scale if at else 3.0 * scale for at in home]
    base = [22.5 if at else 26.0 for at in home]
    return {"zone_id": zone_id, "node": node, "beta": APARTMENT_BETA, "residual_sigma": 0.0,
            "energy_rate": _day(gains), "occupants": _day(occ), "baseline_setpoint": _day(base)}


def dsm_section() -> dict:
    zones = []
    for node, (kind, _, _) in LOAD_TARGETS.items():
        make = _office_zone if kind == "office" else _apartment_zone
        zones.append(make(f"n{node}_core", node, 1.0))
        zones.append(make(f"n{node}_perimeter", node, 0.7))
    return {
        "comfort": {"t_min": 22.0, "t_max": 26.0, "max_ramp": 1.0, "w1": 1.0, "w2": 1.0,
                    "ep": 0.5},
        "grid_step": 0.5, "horizon": 6, "max_sweeps": 20, "chiller_cop": 3.0,
        "ambient": {"generator": "ambient"},
        "zones": zones,
    }


def five_node_document(case: int = 1) -> dict:
    """Scenario document with synthesis sources; case 1 = baseline loads.

    The case-2 document carries the same baseline loads with ``apply_dsm``
    set, so its cooling profiles are produced by the setpoint optimiser.
    """
    buses = [{"id": "0", "kind": "slack"}]
    profiles = {"pv_availability": {"template": "pv"}}
    for node, (kind, elec, cool) in LOAD_TARGETS.items():
        buses.append({"id": node, "kind": "load", "electrical_load": f"elec_{node}",
                      "cooling_load": f"cool_{node}", "candidate_techs": TECHS})
        profiles[f"elec_{node}"] = {"synthesize": {"template": f"{kind}_electric",
                                                   "usage_mwh": elec[1][0], "peak_kw": elec[1][1]}}
        profiles[f"cool_{node}"] = {"synthesize": {"template": f"{kind}_cooling",
                                                   "usage_mwh": cool[1][0], "peak_kw": cool[1][1]}}
    cables = []
    for a, b, heat in (("0", "1", False), ("1", "2", True), ("0", "3", False), ("3", "4", True)):
        cables.append({"from": a, "to": b, "length_m": CABLE_LENGTH_M, "impedance_pu_per_m": 6e-6,
                       "ampacity_pu": 0.4, "carries_heat": heat, "heat_loss_per_m": 1e-4})
    return {
        "label": "Scenario I (setback control)" if case == 1 else "Scenario II (smart control)",
        "apply_dsm": case == 2,
        "network": {"slack_bus": "0", "nominal_voltage_kv": 12.0, "base_power_kva": 10000.0,
                    "v_min": 0.95, "v_max": 1.05, "buses": buses, "cables": cables},
        "catalog": CATALOG,
        "tariff": {"energy_price": {"generator": "tou_prices"},
                   "export_price": {"generator": "tou_prices", "scale": 0.5},
                   "demand_charge": 10.0, "fuel_price_gas": 0.03, "curtailment_penalty": 10.0},
        "time": {"planning_horizon_years": 25, "discount_rate": 0.05},
        "profiles": profiles,
        "dsm": dsm_section(),
    }


def five_node_scenario(case: int = 1):
    from .io import parse_scenario
    return parse_scenario(five_node_document(case))


def load_targets(case: int = 1) -> dict:
    """node -> {"electrical": (MWh, kW), "cooling": (MWh_th, kW_th)}"""
    return {n: {"electrical": e[case], "cooling": c[case]} for n, (_, e, c) in LOAD_TARGETS.items()}


__all__ = ["five_node_document", "five_node_scenario", "load_targets", "LOAD_TARGETS"]
