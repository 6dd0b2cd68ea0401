"""CSV tables, comparison report and static dispatch plots.

Column sets are fixed so files from different runs line up:

* ``portfolio.csv``: ``node,case`` then one column per technology (kW, kWh
  for storage), with an ``aggregate`` row per case;
* ``costs.csv``: ``case`` then the cost components, investment, operation
  and total ($/yr);
* ``dispatch.csv``: ``node,hour,variable,value`` in long form;
* ``comparison.csv``: ``component,a,b,delta,reduction_pct``.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .planner import PlanResult, ScenarioComparison, _node_key  # noqa: E402

COST_COLUMNS = ["C_invd", "C_invc", "investment", "C_pur", "C_dem", "C_gen", "C_exp", "C_curt",
                "operation", "total"]
COMPARISON_COLUMNS = ["component", "a", "b", "delta", "reduction_pct"]
DISPATCH_COLUMNS = ["node", "hour", "variable", "value"]
PLOT_COLUMNS = ["hour", "series", "value"]


def portfolio_frame(results: dict, techs=None) -> pd.DataFrame:
    """Table of installed capacity; ``results`` maps case label -> PlanResult."""
    frames = []
    if techs is None:
        techs = sorted({k for r in results.values() for _, k in r.portfolio.capacity})
    for case, res in results.items():
        t = res.portfolio.table(techs).reset_index()
        t.insert(1, "case", case)
        frames.append(t)
    df = pd.concat(frames, ignore_index=True)
    order = sorted(range(len(df)), key=lambda i: (_row_key(df["node"][i]), i))
    return df.iloc[order].reset_index(drop=True)[["node", "case", *techs]]


def _row_key(node):
    return (1, 0, "") if node == "aggregate" else (0, *_node_key(node)[1:])


def costs_frame(results: dict) -> pd.DataFrame:
    rows = []
    for case, res in results.items():
        d = res.costs.as_dict()
        rows.append({"case": case, **{c: d[c] for c in COST_COLUMNS}})
    return pd.DataFrame(rows, columns=["case", *COST_COLUMNS])


def read_costs_csv(path) -> pd.DataFrame:
    df = pd.read_csv(path, dtype={"case": str})
    if list(df.columns) != ["case", *COST_COLUMNS]:
        raise ValueError(f"{path}: not a costs table")
    return df


def write_plan_outputs(result: PlanResult, out_dir, case: str = "1") -> dict:
    """portfolio.csv, costs.csv and dispatch.csv for one solved plan."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"portfolio": out / "portfolio.csv", "costs": out / "costs.csv",
             "dispatch": out / "dispatch.csv"}
    portfolio_frame({case: result}).to_csv(paths["portfolio"], index=False, float_format="%.6f")
    costs_frame({case: result}).to_csv(paths["costs"], index=False, float_format="%.6f")
    result.dispatch.to_frame()[DISPATCH_COLUMNS].to_csv(paths["dispatch"], index=False,
                                                        float_format="%.9g")
    return paths


def comparison_text(cmp: ScenarioComparison, labels=("Scenario I", "Scenario II")) -> str:
    wa, wb = max(18, len(labels[0]) + 2), max(18, len(labels[1]) + 2)
    lines = [f"{'component':<12}{labels[0]:>{wa}}{labels[1]:>{wb}}{'delta':>16}"
             f"{'reduction %':>14}"]
    for name, (a, b, d, pct) in cmp.rows.items():
        lines.append(f"{name:<12}{a:>{wa},.2f}{b:>{wb},.2f}{d:>16,.2f}{pct:>14.2f}")
    return "\n".join(lines)


def node_day_series(result: PlanResult, node: str, day_slots) -> dict:
    """Electric supply and demand of one node over one typical day (kW).

    Supply is split into local generation per technology, storage
    discharge and the net import from the network; demand is the
    electrical load, chiller draw and storage charging.
    """
    d = result.dispatch
    idx = np.asarray(day_slots)
    supply, demand = {}, {}
    for (var, n, k), vals in sorted(d.series.items()):
        if n != node:
            continue
        if var == "gen":
            supply[f"gen {k}"] = vals[idx]
        elif var == "discharge":
            supply[f"discharge {k}"] = vals[idx]
        elif var == "charge":
            demand[f"charge {k}"] = vals[idx]
        elif var == "chiller_draw":
            demand[f"chiller {k}"] = vals[idx]
        elif var == "load_electrical":
            demand["load"] = vals[idx]
        elif var == "curtail":
            supply["curtailed"] = vals[idx]
    total_demand = sum(demand.values()) + np.zeros(idx.size)
    local = sum(supply.values()) + np.zeros(idx.size)
    supply["network"] = total_demand - local
    return {"supply": supply, "demand": demand}


def plot_node_day(result: PlanResult, node: str, day_slots, svg_path, csv_path, title=""):
    series = node_day_series(result, node, day_slots)
    hours = np.arange(len(day_slots))
    rows = []
    for group in ("supply", "demand"):
        for name, vals in series[group].items():
            rows.append(pd.DataFrame({"hour": hours, "series": f"{group}:{name}", "value": vals}))
    pd.concat(rows, ignore_index=True)[PLOT_COLUMNS].to_csv(csv_path, index=False,
                                                            float_format="%.6f")
    fig, ax = plt.subplots(figsize=(8, 4))
    names = list(series["supply"])
    stacks = [np.asarray(series["supply"][k]) for k in names]
    pos = [np.clip(s, 0, None) for s in stacks]
    neg = [np.clip(s, None, 0) for s in stacks]
    ax.stackplot(hours, *pos, labels=names, step="mid", alpha=0.8)
    if any(np.any(n < 0) for n in neg):
        ax.stackplot(hours, *neg, step="mid", alpha=0.4)
    total = sum(series["demand"].values())
    ax.step(hours, total, where="mid", color="k", lw=1.5, label="total demand")
    if "load" in series["demand"]:
        ax.step(hours, series["demand"]["load"], where="mid", color="k", ls="--", lw=1,
                label="electrical load")
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.set_xlabel("hour")
    ax.set_ylabel("kW")
    ax.set_title(title or f"node {node}")
    ax.legend(loc="upper left", fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(svg_path, format="svg")
    plt.close(fig)


def summer_day(time, month: int = 7) -> int:
    for k, d in enumerate(time.typical_days):
        if d.month == month:
            return k
    return 0


def write_pipeline_outputs(res, out_dir) -> dict:
    """Per-scenario tables, combined tables, the comparison and dispatch plots."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = {"1": res.first, "2": res.second}
    paths = {}
    for case, run in runs.items():
        paths[f"scenario_{case}"] = write_plan_outputs(run.plan, out / f"scenario_{case}", case)
        if run.dsm is not None:
            write_dsm_profiles(run.dsm, out / f"scenario_{case}" / "dsm_profiles.csv")
    plans = {case: run.plan for case, run in runs.items()}
    portfolio_frame(plans).to_csv(out / "portfolio.csv", index=False, float_format="%.6f")
    costs_frame(plans).to_csv(out / "costs.csv", index=False, float_format="%.6f")
    res.comparison.to_frame()[COMPARISON_COLUMNS].to_csv(out / "comparison.csv", index=False,
                                                         float_format="%.6f")
    labels = (res.first.plan.label or "Scenario I", res.second.plan.label or "Scenario II")
    text = comparison_text(res.comparison, labels)
    (out / "report.txt").write_text(
        f"{labels[0]} vs {labels[1]}\n\n{text}\n\n"
        f"Total annual cost reduction: {res.comparison.reduction('total'):.2f} %\n")
    plots = out / "plots"
    plots.mkdir(exist_ok=True)
    for case, run in runs.items():
        time = run.scenario.time
        day = time.slots_of_day(summer_day(time))
        for bus in run.scenario.network.buses:
            if bus.kind == "slack":
                continue
            stem = plots / f"dispatch_s{case}_node{bus.id}"
            plot_node_day(run.plan, bus.id, day, stem.with_suffix(".svg"),
                          stem.with_suffix(".csv"),
                          f"{run.plan.label or 'scenario ' + case}: node {bus.id}, July day")
    paths["comparison"] = out / "comparison.csv"
    paths["report"] = out / "report.txt"
    return paths


def write_dsm_profiles(result, path):
    """Long-form optimised profiles: ``node,profile,hour,value``."""
    rows = []
    for kind, group in (("cooling", result.cooling), ("chiller_electric",
                                                      result.chiller_electric)):
        for node, prof in sorted(group.items(), key=lambda kv: _node_key(kv[0])):
            vals = prof.values
            rows.append(pd.DataFrame({"node": node, "profile": kind,
                                      "hour": np.arange(vals.size), "value": vals}))
    pd.concat(rows, ignore_index=True).to_csv(path, index=False, float_format="%.9g")
