"""Microgrid portfolio planning with a demand-side setpoint layer."""

from .io import Scenario, ScenarioError, dump_scenario, load_scenario, parse_scenario
from .model import (Bus, Cable, ContinuousTech, DiscreteTech, LoadProfile, NetworkModel, Tariff,
                    TechnologyCatalog, TimeStructure, TypicalDay, annual_summary, validate_model)
from .pipeline import PipelineError, plan_scenario, run_dsm, run_pipeline
from .planner import (CostBreakdown, PlanInfeasibleError, PlanResult, PlanValidationError,
                      SolverLimitError, annualize, assemble_plan_milp, compare_scenarios, crf,
                      solve_plan)
from .synth import SynthesisError, SynthesisSpec, synthesize_profile

__version__ = "0.1.0"

__all__ = [
    "Bus", "Cable", "ContinuousTech", "CostBreakdown", "DiscreteTech", "LoadProfile",
    "NetworkModel", "PipelineError", "PlanInfeasibleError", "PlanResult", "PlanValidationError",
    "Scenario", "ScenarioError", "SolverLimitError", "SynthesisError", "SynthesisSpec", "Tariff",
    "TechnologyCatalog", "TimeStructure", "TypicalDay", "annual_summary", "annualize",
    "assemble_plan_milp", "compare_scenarios", "crf", "dump_scenario", "load_scenario",
    "parse_scenario", "plan_scenario", "run_dsm", "run_pipeline", "solve_plan",
    "synthesize_profile", "validate_model",
]
