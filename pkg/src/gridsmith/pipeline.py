"""Two-layer workflow: setpoint-driven cooling profiles, then portfolio planning.

Scenario I is planned from baseline profiles.  Scenario II first replaces
the cooling profile of every node with conditioned zones by its optimised
counterpart, then plans on the same network, catalog and tariff.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .dsm.profiles import DsmResult, build_annual_profiles
from .dsm.setpoint import SetpointOptimizer
from .io import Scenario, ScenarioError
from .planner import (PlanResult, ScenarioComparison, assemble_plan_milp, compare_scenarios,
                      solve_plan)
from .solver import dump_lp


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


def baseline_cooling(scenario: Scenario) -> dict:
    """node -> baseline cooling profile, for nodes that reference one."""
    out = {}
    for bus in scenario.network.buses:
        ref = bus.cooling_load
        if ref is not None:
            out[bus.id] = scenario.profiles[ref]
    return out


def run_dsm(scenario: Scenario, grid_step: Optional[float] = None,
            horizon: Optional[int] = None) -> DsmResult:
    if scenario.dsm is None:
        raise ScenarioError("scenario has no dsm section")
    cfg = scenario.dsm
    chillers = scenario.catalog.of_kind("electric_chiller")
    if chillers:
        cfg = replace(cfg, chiller_cop=chillers[0].cop)
    if grid_step is not None:
        cfg = replace(cfg, grid_step=float(grid_step))
    if horizon is not None:
        cfg = replace(cfg, horizon=int(horizon))
    unknown = {z.node for z in cfg.zones} - set(scenario.network.bus_ids)
    if unknown:
        raise ScenarioError(f"dsm zones reference unknown nodes {sorted(unknown)}")
    opt = SetpointOptimizer(cfg.grid_step, cfg.horizon, cfg.max_sweeps)
    return build_annual_profiles(cfg, scenario.tariff, scenario.time, baseline_cooling(scenario),
                                 opt)


def apply_dsm(scenario: Scenario, result: DsmResult) -> Scenario:
    """Scenario whose cooling profiles are the optimised ones."""
    refs: dict = {}
    for bus in scenario.network.buses:
        if bus.cooling_load is not None:
            refs.setdefault(bus.cooling_load, []).append(bus.id)
    zone_nodes = {z.node for z in scenario.dsm.zones}
    updates = {}
    for ref, nodes in refs.items():
        touched = [n for n in nodes if n in zone_nodes]
        if not touched:
            continue
        if len(nodes) > 1:
            raise ScenarioError(f"cooling profile {ref!r} is shared by nodes {nodes}; "
                                "give each conditioned node its own profile")
        updates[ref] = result.cooling[nodes[0]]
    return scenario.with_profiles(updates, apply_dsm=False)


@dataclass
class ScenarioRun:
    scenario: Scenario
    plan: PlanResult
    dsm: Optional[DsmResult] = None
    seconds: dict = field(default_factory=dict)


def plan_scenario(scenario: Scenario, rel_gap: float = 1e-6, node_limit: int = 10_000,
                  backend: str = "auto", lp_path=None, grid_step=None,
                  horizon=None) -> ScenarioRun:
    """Plan one scenario, running the setpoint layer first when it asks for it."""
    secs = {}
    dsm = None
    planned = scenario
    if scenario.apply_dsm:
        t0 = _time.perf_counter()
        try:
            dsm = run_dsm(scenario, grid_step, horizon)
        except Exception as err:
            raise PipelineError("dsm", err) from err
        planned = apply_dsm(scenario, dsm)
        secs["dsm"] = _time.perf_counter() - t0
    t0 = _time.perf_counter()
    try:
        plan = assemble_plan_milp(planned.network, planned.catalog, planned.tariff,
                                  planned.time, planned.profile_arrays())
    except Exception as err:
        raise PipelineError("assemble", err) from err
    if lp_path is not None:
        dump_lp(plan.problem, lp_path)
    secs["assemble"] = _time.perf_counter() - t0
    t0 = _time.perf_counter()
    try:
        result = solve_plan(plan, rel_gap=rel_gap, node_limit=node_limit, backend=backend,
                            label=scenario.label)
    except Exception as err:
        raise PipelineError("solve", err) from err
    secs["solve"] = _time.perf_counter() - t0
    return ScenarioRun(planned, result, dsm, secs)


@dataclass
class PipelineResult:
    first: ScenarioRun
    second: ScenarioRun
    comparison: ScenarioComparison
    seconds: float = 0.0


def run_pipeline(scenario_1: Scenario, scenario_2: Scenario, out_dir=None,
                 rel_gap: float = 1e-6, node_limit: int = 10_000, backend: str = "auto",
                 dump_lp_files=False, grid_step=None, horizon=None) -> PipelineResult:
    """Plan both scenarios, compare them and optionally write every artifact.

    ``dump_lp_files`` is ``True`` for ``scenario_<k>/plan.lp`` under ``out_dir``
    or a directory that receives ``scenario_<k>.lp``.
    """
    t0 = _time.perf_counter()
    out = Path(out_dir) if out_dir is not None else None
    runs = []
    for k, sc in enumerate((scenario_1, scenario_2), start=1):
        lp_path = None
        if dump_lp_files is True and out is not None:
            (out / f"scenario_{k}").mkdir(parents=True, exist_ok=True)
            lp_path = out / f"scenario_{k}" / "plan.lp"
        elif dump_lp_files not in (None, False, True):
            Path(dump_lp_files).mkdir(parents=True, exist_ok=True)
            lp_path = Path(dump_lp_files) / f"scenario_{k}.lp"
        runs.append(plan_scenario(sc, rel_gap, node_limit, backend, lp_path, grid_step, horizon))
    try:
        comparison = compare_scenarios(runs[0].plan, runs[1].plan)
    except Exception as err:
        raise PipelineError("compare", err) from err
    res = PipelineResult(runs[0], runs[1], comparison)
    if out is not None:
        from .report import write_pipeline_outputs
        try:
            write_pipeline_outputs(res, out)
        except Exception as err:
            raise PipelineError("report", err) from err
    res.seconds = _time.perf_counter() - t0
    return res
