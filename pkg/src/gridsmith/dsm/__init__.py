"""Zone cooling regression, performance curve and setpoint optimisation."""

from .performance import hp_argmax, human_performance
from .profiles import DsmConfig, DsmResult, ZoneConfig, build_annual_profiles, hour_class
from .regression import (FEATURES, RankDeficientError, ZoneCoolingRegressor, ZoneState,
                         ZoneThermalModel, fit_zone_model, predict_cooling_energy)
from .samples import SAMPLE_COLUMNS, fit_models, generate_samples, read_samples_csv
from .setpoint import (ComfortSpec, InfeasibleSetpointError, SetpointOptimizer, SetpointPlan,
                       evaluate_plan, optimize_setpoints)

__all__ = [
    "ComfortSpec", "DsmConfig", "DsmResult", "FEATURES", "InfeasibleSetpointError",
    "RankDeficientError", "SAMPLE_COLUMNS", "SetpointOptimizer", "SetpointPlan", "ZoneConfig",
    "ZoneCoolingRegressor", "ZoneState", "ZoneThermalModel", "build_annual_profiles",
    "evaluate_plan", "fit_models", "fit_zone_model", "generate_samples", "hour_class",
    "hp_argmax", "human_performance", "optimize_setpoints", "predict_cooling_energy",
    "read_samples_csv",
]
