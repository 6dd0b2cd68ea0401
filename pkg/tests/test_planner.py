from types import SimpleNamespace

import numpy as np
import pytest

from gridsmith.io import parse_scenario
from gridsmith.pipeline import PipelineError, plan_scenario, run_pipeline
from gridsmith.planner import (CostBreakdown, PlanInfeasibleError, PlanValidationError,
                               annualize, assemble_plan_milp, compare_scenarios, crf, solve_plan)
from gridsmith.solver import solve_milp

from conftest import tiny_document
from helpers import plan_residuals


def test_crf_and_annualize():
    assert crf(0.05, 25) == pytest.approx(0.070952, abs=1e-6)
    assert annualize(7_000_000, 25, 0.05) == pytest.approx(496_667, abs=1)
    assert crf(0.0, 20) == pytest.approx(0.05)
    # direct evaluation of r (1+r)^n / ((1+r)^n - 1)
    for r, n in ((0.03, 10), (0.08, 6), (0.12, 30)):
        assert crf(r, n) == pytest.approx(r * (1 + r) ** n / ((1 + r) ** n - 1), rel=1e-12)
    with pytest.raises(ValueError):
        crf(0.05, 0)
    with pytest.raises(ValueError):
        annualize(-1.0, 10, 0.05)


def test_compare_reference_totals():
    a = SimpleNamespace(investment=79_420.0, operation=242_711.0 - 79_420.0, total=242_711.0)
    b = SimpleNamespace(investment=68_461.0, operation=216_807.0 - 68_461.0, total=216_807.0)
    cmp = compare_scenarios(a, b)
    assert cmp.reduction("total") == pytest.approx(10.67, abs=0.01)
    assert cmp.reduction("investment") == pytest.approx(13.79, abs=0.01)
    assert cmp.rows["total"][2] == pytest.approx(216_807 - 242_711)


def test_compare_zero_delta_and_breakdowns():
    c = CostBreakdown(c_invd=10.0, c_pur=5.0, c_exp=1.0)
    cmp = compare_scenarios(c, c)
    assert all(row[2] == 0.0 and row[3] == 0.0 for row in cmp.rows.values())
    assert list(cmp.to_frame().columns) == ["component", "a", "b", "delta", "reduction_pct"]
    assert c.total == pytest.approx(14.0)


@pytest.fixture(scope="module")
def tiny_run():
    return plan_scenario(parse_scenario(tiny_document()))


def test_tiny_plan_invariants(tiny_run):
    res = tiny_run.plan
    assert res.solution.status == "optimal"
    r = plan_residuals(res)
    assert r["power_balance_pu"] <= 1e-6
    assert r["cooling_balance_kw"] <= 1e-6 and r["heat_balance_kw"] <= 1e-6
    assert r["soc_below_zero"] <= 1e-6 and r["soc_above_cap"] <= 1e-6
    assert r["soc_recursion"] <= 1e-6
    assert r["max_abs_flow_pu"] <= 0.4 + 1e-9
    assert 0.95 - 1e-9 <= r["v_min"] and r["v_max"] <= 1.05 + 1e-9
    assert r["unit_multiple_err"] <= 1e-9


def test_tiny_costs_consistent(tiny_run):
    res = tiny_run.plan
    assert res.costs.total == pytest.approx(res.solution.objective, rel=1e-6)
    assert res.costs.investment >= 0 and res.costs.c_curt == pytest.approx(0.0, abs=1e-6)
    table = res.portfolio.table()
    assert "aggregate" in table.index
    assert table.loc["aggregate"].sum() == pytest.approx(sum(res.portfolio.capacity.values()))


def test_backends_agree():
    sc = parse_scenario(tiny_document())
    plan = assemble_plan_milp(sc.network, sc.catalog, sc.tariff, sc.time, sc.profile_arrays())
    a = solve_plan(plan, backend="highs")
    b = solve_plan(plan, backend="simplex")
    assert b.solution.objective == pytest.approx(a.solution.objective, rel=1e-6)


def test_plan_is_deterministic(tiny_run):
    again = plan_scenario(parse_scenario(tiny_document()))
    assert again.plan.solution.objective == tiny_run.plan.solution.objective
    assert again.plan.portfolio.capacity == tiny_run.plan.portfolio.capacity


def test_infeasible_thermal_peak():
    sc = parse_scenario(tiny_document(cool_peak=5000.0))
    plan = assemble_plan_milp(sc.network, sc.catalog, sc.tariff, sc.time, sc.profile_arrays())
    with pytest.raises(PlanInfeasibleError, match="nodes 1, 2") as err:
        solve_plan(plan)
    assert err.value.nodes == ["1", "2"]


def test_validation_error_lists_violations():
    doc = tiny_document()
    doc["network"]["cables"].pop()
    sc = parse_scenario(doc)
    with pytest.raises(PlanValidationError, match="not connected") as err:
        assemble_plan_milp(sc.network, sc.catalog, sc.tariff, sc.time, sc.profile_arrays())
    assert err.value.violations


def test_node_limit_returns_incumbent_or_limit():
    sc = parse_scenario(tiny_document())
    plan = assemble_plan_milp(sc.network, sc.catalog, sc.tariff, sc.time, sc.profile_arrays())
    res = solve_plan(plan, node_limit=1)
    assert res.solution.status in ("optimal", "node_limit")
    assert res.costs.total >= solve_plan(plan).costs.total - 1e-6


def test_dsm_lowers_tiny_cooling_and_cost(tmp_path):
    res = run_pipeline(parse_scenario(tiny_document()),
                       parse_scenario(tiny_document(apply_dsm=True)), tmp_path)
    w = res.first.scenario.time.slot_weights
    for node in ("1", "2"):
        a = res.first.plan.plan.loads["cooling"][node]
        b = res.second.plan.plan.loads["cooling"][node]
        assert w @ b < w @ a
    assert res.second.plan.costs.total < res.first.plan.costs.total
    assert res.comparison.reduction("total") > 0
    assert (tmp_path / "comparison.csv").exists()
    assert (tmp_path / "scenario_2" / "dsm_profiles.csv").exists()


def test_pipeline_reports_failing_stage():
    doc = tiny_document(apply_dsm=True)
    doc["dsm"]["zones"][0]["node"] = "9"
    with pytest.raises(PipelineError) as err:
        plan_scenario(parse_scenario(doc))
    assert err.value.stage == "dsm"


def test_mismatched_configs_rejected(tiny_run):
    doc = tiny_document()
    doc["tariff"]["demand_charge"] = 12.0
    other = plan_scenario(parse_scenario(doc))
    with pytest.raises(ValueError, match="different"):
        compare_scenarios(tiny_run.plan, other.plan)
    assert compare_scenarios(tiny_run.plan, other.plan, check_config=False).rows


def test_presolved_plan_matches_unpresolved():
    sc = parse_scenario(tiny_document())
    plan = assemble_plan_milp(sc.network, sc.catalog, sc.tariff, sc.time, sc.profile_arrays())
    a = solve_milp(plan.problem, use_presolve=True)
    b = solve_milp(plan.problem, use_presolve=False)
    assert a.status == b.status == "optimal"
    assert abs(a.objective - b.objective) <= 1e-9 * max(1.0, abs(b.objective))
