"""Shared generators and independent checks for the test suite."""

from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp

from gridsmith.solver import LinearProgram, MilpProblem


def random_lp(rng, n=None, m=None, sense="min", free_frac=0.0):
    """Feasible, bounded LP: finite box bounds around a known feasible point."""
    n = n or int(rng.integers(1, 11))
    m = m or int(rng.integers(1, 11))
    A = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.7)
    lo = rng.uniform(-5, 0, n)
    hi = lo + rng.uniform(0.5, 10, n)
    x0 = rng.uniform(lo, hi)
    senses = rng.choice(["<=", ">=", "="], size=m, p=[0.45, 0.35, 0.2])
    act = A @ x0
    slack = rng.uniform(0, 3, m)
    b = np.where(senses == "<=", act + slack, np.where(senses == ">=", act - slack, act))
    free = rng.random(n) < free_frac
    lo = np.where(free, -np.inf, lo)
    hi = np.where(free, np.inf, hi)
    if free.any():
        # free columns stay bounded through explicit rows rather than bounds
        k = int(free.sum())
        extra = np.zeros((2 * k, n))
        for i, j in enumerate(np.flatnonzero(free)):
            extra[2 * i, j] = 1.0
            extra[2 * i + 1, j] = -1.0
        A = np.vstack([A, extra])
        b = np.concatenate([b, np.ravel([[x0[j] + 5.0, -x0[j] + 5.0]
                                          for j in np.flatnonzero(free)])])
        senses = np.concatenate([senses, ["<="] * (2 * k)])
    c = rng.normal(size=n)
    return LinearProgram(c, sp.csr_matrix(A), list(senses), b, lo, hi, sense=sense)


def lagrangian_bound(lp: LinearProgram, y, d=None, tol=1e-9):
    """Objective bound implied by row multipliers ``y``, in the problem's own sense.

    A lower bound for minimisation and an upper bound for maximisation; an
    infinite bound of the appropriate sign when the multipliers are invalid.
    """
    sgn = -1.0 if lp.sense == "max" else 1.0
    bad = -sgn * np.inf
    c = sgn * np.asarray(lp.c, float)
    y = sgn * np.asarray(y, float)
    for s, yi in zip(lp.senses, y):
        if s == "<=" and yi > tol or s == ">=" and yi < -tol:
            return bad
    d = c - lp.A.T @ y
    val = float(lp.b @ y)
    for dj, l, h in zip(d, lp.lo, lp.hi):
        if dj > tol:
            if not np.isfinite(l):
                return bad
            val += dj * l
        elif dj < -tol:
            if not np.isfinite(h):
                return bad
            val += dj * h
        else:
            lim = l if np.isfinite(l) else (h if np.isfinite(h) else 0.0)
            val += dj * lim
    return sgn * val + lp.offset


def random_milp(rng, n_bin=None, n_cont=None, m=None):
    """Small mixed binary problem; binaries come first."""
    n_bin = n_bin or int(rng.integers(1, 11))
    n_cont = int(rng.integers(0, 4)) if n_cont is None else n_cont
    n = n_bin + n_cont
    m = m or int(rng.integers(1, 8))
    A = np.round(rng.normal(size=(m, n)) * 4) * (rng.random((m, n)) < 0.8)
    lo = np.zeros(n)
    hi = np.concatenate([np.ones(n_bin), rng.uniform(1, 5, n_cont)])
    x0 = np.concatenate([rng.integers(0, 2, n_bin), rng.uniform(0, hi[n_bin:])])
    senses = rng.choice(["<=", ">="], size=m)
    act = A @ x0
    b = np.where(senses == "<=", act + rng.uniform(0, 2, m), act - rng.uniform(0, 2, m))
    c = np.round(rng.normal(size=n) * 10, 2)
    lp = LinearProgram(c, sp.csr_matrix(A), list(senses), b, lo, hi)
    return MilpProblem(lp, ["binary"] * n_bin + ["continuous"] * n_cont)


def enumerate_milp(problem: MilpProblem, lp_solver):
    """Best objective over every binary assignment (continuous part by LP)."""
    lp = problem.lp
    mask = problem.integer_mask
    idx = np.flatnonzero(mask)
    best = np.inf
    for bits in itertools.product((0.0, 1.0), repeat=idx.size):
        lo, hi = lp.lo.copy(), lp.hi.copy()
        lo[idx] = bits
        hi[idx] = bits
        sol = lp_solver(lp.with_bounds(lo, hi))
        if sol.status == "optimal":
            best = min(best, sol.objective)
    return best


def plan_residuals(result) -> dict:
    """Largest violation of each physical invariant, computed from extracted results only."""
    plan = result.plan
    net = plan.net
    d = result.dispatch
    base = net.base_power_kva
    T = d.imp.size
    out = {}
    # electrical balance per node in pu
    worst = 0.0
    for b in net.buses:
        inj = np.zeros(T)
        if b.id == net.slack_bus:
            inj += d.imp - d.exp
        for (var, n, k), vals in d.series.items():
            if n != b.id:
                continue
            if var in ("gen", "discharge", "curtail"):
                inj += vals
            elif var in ("charge", "chiller_draw", "load_electrical"):
                inj -= vals
        flow = np.zeros(T)
        for ci, c in enumerate(net.cables):
            if c.from_bus == b.id:
                flow -= d.flows_pu[ci]
            elif c.to_bus == b.id:
                flow += d.flows_pu[ci]
        worst = max(worst, float(np.max(np.abs(inj / base + flow))))
    out["power_balance_pu"] = worst
    # cooling balance
    cops = {t.id: t.cop for t in plan.catalog.continuous if t.kind.endswith("chiller")}
    worst = 0.0
    for n, load in plan.loads["cooling"].items():
        sup = np.zeros(T)
        for (var, node, k), vals in d.series.items():
            if node == n and var in ("chiller_draw", "absorption_draw"):
                sup += cops[k] * vals
            elif node == n and var == "cold_discharge":
                sup += vals
            elif node == n and var == "cold_charge":
                sup -= vals
        worst = max(worst, float(np.max(np.abs(sup - load))))
    out["cooling_balance_kw"] = worst
    # heat balance: recovered CHP heat less absorption input, vent and link flows
    hpr = {t.id: t.heat_to_power_ratio for t in plan.catalog.discrete}
    worst = 0.0
    for b in net.buses:
        bal = -plan.loads["heating"].get(b.id, np.zeros(T))
        for (var, n, k), vals in d.series.items():
            if n != b.id:
                continue
            if var == "gen" and k in hpr:
                bal = bal + hpr[k] * vals
            elif var in ("boiler", "heat_discharge"):
                bal = bal + vals
            elif var in ("absorption_draw", "heat_charge", "vent"):
                bal = bal - vals
        for ci, c in enumerate(net.cables):
            if not c.carries_heat:
                continue
            fwd = d.get("heat_flow", f"cable{ci}", "fwd")
            rev = d.get("heat_flow", f"cable{ci}", "rev")
            keep = 1.0 - c.heat_loss_per_m * c.length_m
            if c.from_bus == b.id:
                bal = bal - fwd + keep * rev
            elif c.to_bus == b.id:
                bal = bal + keep * fwd - rev
        worst = max(worst, float(np.max(np.abs(bal))))
    out["heat_balance_kw"] = worst
    # storage
    soc_low, soc_high, cyc = 0.0, 0.0, 0.0
    time = plan.time
    for (var, n, k), soc in d.series.items():
        if var != "soc":
            continue
        tech = plan.catalog.get(k)
        cap = result.portfolio.capacity[n, k]
        soc_low = max(soc_low, float(-soc.min()))
        soc_high = max(soc_high, float(soc.max() - cap))
        ch = d.get("charge", n, k)
        dis = d.get("discharge", n, k)
        for day in range(time.n_days):
            s = list(time.slots_of_day(day))
            prev = np.roll(soc[s], 1)
            rec = ((1 - tech.decay_per_hour) * prev + tech.eta_charge * ch[s]
                   - dis[s] / tech.eta_discharge)
            cyc = max(cyc, float(np.max(np.abs(rec - soc[s]))))
    out["soc_below_zero"] = soc_low
    out["soc_above_cap"] = soc_high
    out["soc_recursion"] = cyc
    out["max_abs_flow_pu"] = max((float(np.max(np.abs(f))) for f in d.flows_pu.values()),
                                 default=0.0)
    v = np.concatenate(list(d.volts_pu.values()))
    out["v_min"] = float(v.min())
    out["v_max"] = float(v.max())
    unit_err = 0.0
    for (n, k), u in result.portfolio.units.items():
        size = plan.catalog.get(k).unit_capacity_kw
        unit_err = max(unit_err, abs(result.portfolio.capacity[n, k] / size
                                     - round(result.portfolio.capacity[n, k] / size)))
    out["unit_multiple_err"] = unit_err
    return out
