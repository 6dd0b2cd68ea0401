"""Zone setpoint scheduling over a short horizon.

Setpoints are restricted to a grid inside the comfort band.  Each zone is
solved exactly by dynamic programming whose state is the last three
temperatures (the regression lags); zones of one building are coupled
through the other-zone temperature sum and are coordinated by Gauss-Seidel
sweeps that minimise the building's total objective one zone at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .performance import human_performance
from .regression import ZoneState, ZoneThermalModel

RAMP_TOL = 1e-9


class InfeasibleSetpointError(RuntimeError):
    """No setpoint sequence satisfies the comfort band and ramp limit."""

    def __init__(self, msg, zone=None, hour=None):
        super().__init__(msg)
        self.zone = zone
        self.hour = hour


@dataclass(frozen=True)
class ComfortSpec:
    t_min: float = 22.0
    t_max: float = 26.0
    max_ramp: float = 1.0
    w1: float = 1.0
    w2: float = 1.0
    ep: float = 0.5  # $ per occupant-step
    occupants: object = 1.0  # scalar or per-step series

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be < t_max")
        if self.max_ramp <= 0:
            raise ValueError("max_ramp must be > 0")
        if self.w1 < 0 or self.w2 < 0:
            raise ValueError("weights must be >= 0")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_min + self.t_max)

    def levels(self, step: float) -> np.ndarray:
        n = int(np.floor((self.t_max - self.t_min) / step + 1e-9))
        return self.t_min + step * np.arange(n + 1)

    def occupants_at(self, horizon: int) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.occupants, dtype=float), (horizon,)).astype(float)


@dataclass
class SetpointPlan:
    setpoints: dict
    objective: float
    ase: dict
    sweeps: int = 1
    objective_history: list = field(default_factory=list)

    def zone_ids(self):
        return list(self.setpoints)


@dataclass(frozen=True)
class _Horizon:
    """Exogenous series for one zone over the horizon."""

    history: np.ndarray  # lag1, lag2, lag3
    energy_rate: np.ndarray
    ambient: np.ndarray
    tau: np.ndarray


def _expand_state(state, horizon) -> _Horizon:
    if isinstance(state, ZoneState):
        hist, e, amb, tau = state.temp_history, state.energy_rate, state.ambient, state.time_of_day
    else:
        hist, e, amb, tau = (state["temp_history"], state["energy_rate"], state["ambient"],
                             state["time_of_day"])

    def series(v):
        return np.broadcast_to(np.asarray(v, dtype=float), (horizon,)).astype(float)

    return _Horizon(np.asarray(hist, dtype=float), series(e), series(amb), series(tau))


def _base_terms(beta, hz: _Horizon):
    """beta0 + beta1 E + beta2 T_inf + beta7 tau for each step."""
    return beta[0] + beta[1] * hz.energy_rate + beta[2] * hz.ambient + beta[7] * hz.tau


def evaluate_plan(models: Mapping[str, ZoneThermalModel], states, comfort, prices,
                  setpoints: Mapping[str, np.ndarray]):
    """Objective and per-zone cooling energy of a fixed plan."""
    zones = list(models)
    horizon = len(next(iter(setpoints.values())))
    prices = np.asarray(prices, dtype=float)[:horizon]
    total = 0.0
    ase = {}
    for z in zones:
        cz = comfort[z] if isinstance(comfort, Mapping) else comfort
        b = models[z].beta
        hz = _expand_state(states[z], horizon)
        T = np.asarray(setpoints[z], dtype=float)
        full = np.concatenate([hz.history[::-1], T])  # lag3, lag2, lag1, T0, ...
        others = sum(np.asarray(setpoints[i], dtype=float) for i in zones if i != z)
        others = np.zeros(horizon) + others
        lin = (_base_terms(b, hz) + b[3] * T + b[4] * full[2:2 + horizon]
               + b[5] * full[1:1 + horizon] + b[6] * full[0:horizon] + b[8] * others)
        a = np.maximum(lin, 0.0)
        ase[z] = a
        hp = human_performance(T)
        total += float(np.sum(cz.w1 * a * prices
                              + cz.w2 * (1.0 - hp) * cz.ep * cz.occupants_at(horizon)))
    return total, ase


def check_plan(setpoints, comfort, history_lag1) -> bool:
    T = np.asarray(setpoints, dtype=float)
    if np.any(T < comfort.t_min - 1e-9) or np.any(T > comfort.t_max + 1e-9):
        return False
    steps = np.diff(np.concatenate([[history_lag1], T]))
    return bool(np.all(np.abs(steps) <= comfort.max_ramp + RAMP_TOL))


def _zone_dp(beta, hz: _Horizon, comfort: ComfortSpec, prices, levels, others_sum,
             extra_cost):
    """Exact DP for one zone. ``extra_cost`` has shape (horizon, n_levels).

    Returns (setpoint indices into ``levels``, optimal cost).
    """
    H = prices.size
    L = levels.size
    vals = np.concatenate([hz.history, levels])  # index 0..2 = lag1..lag3
    K = vals.size
    base = _base_terms(beta, hz) + beta[8] * others_sum
    occ = comfort.occupants_at(H)
    hp_pen = comfort.w2 * (1.0 - human_performance(levels)) * comfort.ep
    J = np.full((K, K, K), np.inf)
    J[0, 1, 2] = 0.0
    u = vals[3:][:, None, None, None]
    va = vals[None, :, None, None]
    vb = vals[None, None, :, None]
    vc = vals[None, None, None, :]
    lag_part = beta[4] * va + beta[5] * vb + beta[6] * vc
    ramp_ok = np.abs(u - va) <= comfort.max_ramp + RAMP_TOL  # (L, K, 1, 1)
    back = []
    for t in range(H):
        lin = base[t] + beta[3] * u + lag_part
        stage = comfort.w1 * prices[t] * np.maximum(lin, 0.0)
        stage = stage + (hp_pen * occ[t] + extra_cost[t])[:, None, None, None]
        total = np.where(ramp_ok, J[None, :, :, :] + stage, np.inf)
        arg = np.argmin(total, axis=3)  # (L, K, K)
        best = np.take_along_axis(total, arg[..., None], axis=3)[..., 0]
        J = np.full((K, K, K), np.inf)
        J[3:] = best
        back.append(arg)
    flat = int(np.argmin(J))
    opt = float(J.flat[flat])
    if not np.isfinite(opt):
        return None, np.inf
    a, b, c = np.unravel_index(flat, J.shape)
    seq = []
    for t in range(H - 1, -1, -1):
        seq.append(a - 3)
        prev_c = back[t][a - 3, b, c]
        a, b, c = b, c, prev_c
    return np.array(seq[::-1], dtype=int), opt


def _cross_cost(models, hzs, comfort, prices, levels, plans, z, zones):
    """Cost of the other zones' cooling as a function of zone ``z``'s setpoint."""
    H = prices.size
    extra = np.zeros((H, levels.size))
    for i in zones:
        if i == z:
            continue
        b = models[i].beta
        ci = comfort[i] if isinstance(comfort, Mapping) else comfort
        T = plans[i]
        hz = hzs[i]
        full = np.concatenate([hz.history[::-1], T])
        rest = sum(plans[k] for k in zones if k not in (i, z)) + np.zeros(H)
        lin = (_base_terms(b, hz) + b[3] * T + b[4] * full[2:2 + H] + b[5] * full[1:1 + H]
               + b[6] * full[0:H] + b[8] * rest)
        extra += ci.w1 * prices[:, None] * np.maximum(lin[:, None] + b[8] * levels[None, :], 0.0)
    return extra


class SetpointOptimizer(BaseEstimator):
    """Grid-restricted setpoint scheduler.

    Parameters
    ----------
    grid_step : float
        Spacing of admissible setpoints (degC) starting at the band minimum.
    horizon : int
        Number of steps planned.
    max_sweeps : int
        Gauss-Seidel sweep limit for multi-zone buildings.
    """

    def __init__(self, grid_step=0.5, horizon=6, max_sweeps=20):
        self.grid_step = grid_step
        self.horizon = horizon
        self.max_sweeps = max_sweeps

    def optimize(self, models, states, comfort, prices, horizon: Optional[int] = None,
                 initial: Optional[Mapping[str, np.ndarray]] = None) -> SetpointPlan:
        H = int(horizon or self.horizon)
        if H < 1:
            raise ValueError("horizon must be >= 1")
        prices = np.asarray(prices, dtype=float)
        if prices.size < H:
            raise ValueError(f"price series has {prices.size} values, horizon is {H}")
        prices = prices[:H]
        if isinstance(models, ZoneThermalModel):
            models, states = {models.zone_id: models}, {models.zone_id: states}
        zones = sorted(models)
        models = {z: models[z] for z in zones}
        comforts = {z: comfort[z] if isinstance(comfort, Mapping) else comfort for z in zones}
        hzs = {z: _expand_state(states[z], H) for z in zones}
        lv = {z: comforts[z].levels(self.grid_step) for z in zones}
        plans = {}
        for z in zones:
            if initial is not None and z in initial:
                plans[z] = np.asarray(initial[z], dtype=float)
            else:
                start = np.clip(hzs[z].history[0], comforts[z].t_min, comforts[z].t_max)
                plans[z] = np.full(H, start)
        feasible = {z: False for z in zones}
        history = []
        sweeps = 0
        for sweeps in range(1, int(self.max_sweeps) + 1):
            changed = False
            for z in zones:
                others = sum(plans[i] for i in zones if i != z) + np.zeros(H)
                extra = _cross_cost(models, hzs, comforts, prices, lv[z], plans, z, zones)
                idx, opt = _zone_dp(np.array(models[z].beta), hzs[z], comforts[z], prices,
                                    lv[z], others, extra)
                if idx is None:
                    raise InfeasibleSetpointError(
                        f"zone {z}: comfort band [{comforts[z].t_min}, {comforts[z].t_max}] "
                        f"unreachable from {hzs[z].history[0]} degC with ramp "
                        f"{comforts[z].max_ramp} degC/step", zone=z)
                cand = lv[z][idx]
                if feasible[z]:
                    cur = evaluate_plan(models, states_for(hzs), comforts, prices, plans)[0]
                    trial = dict(plans)
                    trial[z] = cand
                    new = evaluate_plan(models, states_for(hzs), comforts, prices, trial)[0]
                    if not new < cur - 1e-12 * (1.0 + abs(cur)):
                        continue
                plans[z] = cand
                feasible[z] = True
                changed = True
            history.append(evaluate_plan(models, states_for(hzs), comforts, prices, plans)[0])
            if not changed or len(zones) == 1:
                break
        obj, ase = evaluate_plan(models, states_for(hzs), comforts, prices, plans)
        return SetpointPlan(dict(plans), obj, ase, sweeps, history)


def states_for(hzs):
    return {z: {"temp_history": h.history, "energy_rate": h.energy_rate, "ambient": h.ambient,
                "time_of_day": h.tau} for z, h in hzs.items()}


def optimize_setpoints(models, states, comfort, prices, horizon: int = 6,
                       grid_step: float = 0.5, max_sweeps: int = 20) -> SetpointPlan:
    """Minimise priced cooling energy plus the performance penalty."""
    return SetpointOptimizer(grid_step=grid_step, horizon=horizon,
                             max_sweeps=max_sweeps).optimize(models, states, comfort, prices)
