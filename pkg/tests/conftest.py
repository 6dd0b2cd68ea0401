import time

import numpy as np
import pytest

from gridsmith.fixtures import five_node_scenario
from gridsmith.io import parse_scenario
from gridsmith.pipeline import run_pipeline

HOURS = np.arange(24)


def tiny_document(apply_dsm=False, cool_peak=300.0):
    """Three-bus, one-typical-day case that plans in well under a second."""
    elec1 = (120 + 80 * np.sin(np.pi * np.clip(HOURS - 6, 0, 12) / 12)).tolist()
    elec2 = (60 + 30 * ((HOURS >= 17) | (HOURS < 8))).tolist()
    cool = (cool_peak * (0.3 + 0.7 * np.sin(np.pi * np.clip(HOURS - 7, 0, 11) / 11))).tolist()
    price = [0.06 if h < 8 or h >= 22 else (0.16 if 12 <= h < 19 else 0.10) for h in HOURS]
    pv = np.clip(np.sin(np.pi * (HOURS - 6) / 13), 0, None).round(6).tolist()
    occ = [20.0 if 8 <= h < 18 else 0.0 for h in HOURS]
    return {
        "label": "tiny II" if apply_dsm else "tiny I",
        "apply_dsm": apply_dsm,
        "network": {
            "slack_bus": "0", "base_power_kva": 1000.0,
            "buses": [
                {"id": "0", "kind": "slack"},
                {"id": "1", "electrical_load": "e1", "cooling_load": "c1",
                 "candidate_techs": ["MT", "PV", "ESS", "EC"]},
                {"id": "2", "electrical_load": "e2", "cooling_load": "c2",
                 "candidate_techs": ["PV", "ESS", "EC", "AC"]},
            ],
            "cables": [
                {"from": "0", "to": "1", "length_m": 300.0},
                {"from": "1", "to": "2", "length_m": 150.0, "carries_heat": True},
            ],
        },
        "catalog": {
            "discrete": [{"id": "MT", "unit_capacity_kw": 60.0, "capital_cost_per_kw": 900.0,
                          "lifetime_years": 20, "electrical_efficiency": 0.35,
                          "heat_to_power_ratio": 1.3, "max_units": 3}],
            "continuous": [
                {"id": "PV", "kind": "pv", "fixed_cost": 500.0, "variable_cost_per_kw": 900.0,
                 "lifetime_years": 25, "max_capacity_kw": 400.0},
                {"id": "ESS", "kind": "ess", "fixed_cost": 200.0,
                 "variable_cost_per_kw": 150.0, "lifetime_years": 10, "eta_charge": 0.95,
                 "eta_discharge": 0.95, "decay_per_hour": 0.001, "power_ratio": 0.5,
                 "max_capacity_kw": 500.0},
                {"id": "EC", "kind": "electric_chiller", "fixed_cost": 0.0, "variable_cost_per_kw": 50.0,
                 "lifetime_years": 20, "cop": 3.0, "max_capacity_kw": 1000.0},
                {"id": "AC", "kind": "absorption_chiller", "fixed_cost": 0.0,
                 "variable_cost_per_kw": 120.0,
                 "lifetime_years": 20, "cop": 0.7, "max_capacity_kw": 1000.0},
            ],
        },
        "tariff": {"energy_price": price, "export_price": [p * 0.5 for p in price],
                   "demand_charge": 10.0, "fuel_price_gas": 0.03},
        "time": {"typical_days": [{"index": 0, "weight": 365.0, "month": 7}],
                 "discount_rate": 0.05},
        "profiles": {"e1": elec1, "e2": elec2, "c1": cool, "c2": [v * 0.5 for v in cool],
                     "pv_availability": pv},
        "dsm": {
            "comfort": {"t_min": 22.0, "t_max": 26.0, "max_ramp": 1.0, "w1": 1.0, "w2": 1.0,
                        "ep": 0.5},
            "horizon": 4,
            "ambient": (27 + 5 * np.sin(np.pi * (HOURS - 9) / 12)).round(3).tolist(),
            "zones": [
                {"zone_id": f"z{n}", "node": n,
                 "beta": [10.0, 0.8, 1.2, -3.0, 0.9, 0.4, 0.2, 0.6, -0.3],
                 "energy_rate": [15.0 if 8 <= h < 18 else 4.0 for h in HOURS],
                 "occupants": occ, "baseline_setpoint": [22.0 if 7 <= h < 18 else 26.0
                                                         for h in HOURS]}
                for n in ("1", "2")],
        },
    }


@pytest.fixture
def tiny_doc():
    return tiny_document()


@pytest.fixture
def tiny_scenario():
    return parse_scenario(tiny_document())


@pytest.fixture(scope="session")
def fixture_pipeline(tmp_path_factory):
    """Both bundled scenarios planned once per session, with artifacts written."""
    out = tmp_path_factory.mktemp("pipeline")
    t0 = time.perf_counter()
    res = run_pipeline(five_node_scenario(1), five_node_scenario(2), out)
    return res, time.perf_counter() - t0, out


CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; printed now and again in the terminal summary."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        CRITERIA.setdefault(number, []).append((ok, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        entries = CRITERIA[number]
        ok = all(e[0] for e in entries)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}")
        for _, line in entries:
            terminalreporter.write_line(f"    {line}")
