"""Command-line entry point ``gridsmith``.

Exit codes: 0 success, 2 invalid input, 3 infeasible problem, 4 solver limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .dsm.regression import ZoneThermalModel
from .dsm.samples import fit_models, generate_samples, read_samples_csv, write_samples_csv
from .dsm.setpoint import InfeasibleSetpointError
from .io import Scenario, bundled_path, load_scenario, write_profile_csv
from .pipeline import PipelineError, plan_scenario, run_dsm, run_pipeline
from .planner import (CostBreakdown, PlanInfeasibleError, SolverLimitError, compare_scenarios)
from .report import (comparison_text, read_costs_csv, write_dsm_profiles, write_plan_outputs)

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 2, 3, 4


def exit_code_for(err: BaseException) -> int:
    if isinstance(err, PipelineError):
        err = err.cause
    if isinstance(err, (PlanInfeasibleError, InfeasibleSetpointError)):
        return EXIT_INFEASIBLE
    if isinstance(err, SolverLimitError):
        return EXIT_LIMIT
    return EXIT_VALIDATION


def _scenario(path: str, models_path=None) -> Scenario:
    if path.startswith("bundled:"):
        path = bundled_path(path.split(":", 1)[1])
    sc = load_scenario(path)
    if models_path:
        sc = with_models(sc, load_models(models_path))
    return sc


def load_models(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    return {z: ZoneThermalModel(tuple(m["beta"]), m.get("residual_sigma", 0.0), z)
            for z, m in doc.items()}


def with_models(sc: Scenario, models: dict) -> Scenario:
    if sc.dsm is None:
        raise ValueError("scenario has no dsm section")
    zones = tuple(replace(z, model=models.get(z.zone_id, z.model)) for z in sc.dsm.zones)
    return replace(sc, dsm=replace(sc.dsm, zones=zones))


def _apply_dsm_overrides(sc: Scenario, args) -> Scenario:
    if sc.dsm is None:
        return sc
    upd = {}
    if getattr(args, "horizon", None) is not None:
        upd["horizon"] = args.horizon
    if getattr(args, "grid_step", None) is not None:
        upd["grid_step"] = args.grid_step
    return replace(sc, dsm=replace(sc.dsm, **upd)) if upd else sc


def cmd_fit_dsm(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.samples:
        df = read_samples_csv(args.samples)
    else:
        if not args.scenario:
            raise ValueError("fit-dsm needs --samples or --scenario (to generate samples)")
        sc = _scenario(args.scenario)
        if sc.dsm is None:
            raise ValueError("scenario has no dsm section")
        df = generate_samples(sc.dsm, seed=args.seed, noise=args.noise)
        write_samples_csv(df, out / "samples.csv")
    models = fit_models(df)
    doc = {z: {"beta": list(m.beta), "residual_sigma": m.residual_sigma}
           for z, m in models.items()}
    (out / "models.json").write_text(json.dumps(doc, indent=1))
    for z, m in models.items():
        print(f"{z}: beta={np.round(m.beta, 6).tolist()} sigma={m.residual_sigma:.6g}")
    return EXIT_OK


def cmd_dsm(args) -> int:
    sc = _scenario(args.scenario, args.models)
    res = run_dsm(sc, args.grid_step, args.horizon)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_dsm_profiles(res, out)
    for node, prof in res.cooling.items():
        write_profile_csv(out.with_name(f"{out.stem}_{node}_cooling.csv"), prof.values)
        write_profile_csv(out.with_name(f"{out.stem}_{node}_chiller_electric.csv"),
                          res.chiller_electric[node].values)
    w = sc.time.slot_weights
    base = {b.id: sc.profiles[b.cooling_load].values for b in sc.network.buses if b.cooling_load}
    for node, prof in res.cooling.items():
        b = base[node]
        print(f"node {node}: cooling {np.sum(w * b) / 1000:.1f} -> "
              f"{np.sum(w * prof.values) / 1000:.1f} MWh_th, peak {b.max():.1f} -> "
              f"{prof.values.max():.1f} kW_th")
    return EXIT_OK


def cmd_plan(args) -> int:
    sc = _apply_dsm_overrides(_scenario(args.scenario, args.models), args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run = plan_scenario(sc, rel_gap=args.rel_gap, node_limit=args.node_limit,
                        lp_path=_lp_path(args.dump_lp, out))
    write_plan_outputs(run.plan, out, case=args.case)
    if run.dsm is not None:
        write_dsm_profiles(run.dsm, out / "dsm_profiles.csv")
    c = run.plan.costs
    print(f"{sc.label}: investment {c.investment:,.2f}  operation {c.operation:,.2f}  "
          f"total {c.total:,.2f} $/yr  [{run.plan.solution.status}, "
          f"{run.plan.solution.nodes} nodes]")
    print(run.plan.portfolio.table().round(2).to_string())
    return _limit_status(run.plan)


def _lp_path(flag, out: Path):
    if flag is None:
        return None
    if flag is True:
        return out / "plan.lp"
    Path(flag).parent.mkdir(parents=True, exist_ok=True)
    return Path(flag)


def _limit_status(plan) -> int:
    """Results are written either way; an unproven gap still exits non-zero."""
    if plan.solution.status != "optimal":
        print(f"warning: {plan.label or 'plan'} stopped at {plan.solution.status} with gap "
              f"{plan.solution.gap:.3g}", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_OK


def _costs_rows(path) -> list:
    p = Path(path)
    if p.is_dir():
        p = p / "costs.csv"
    df = read_costs_csv(p)
    cols = ["C_invd", "C_invc", "C_pur", "C_dem", "C_gen", "C_exp", "C_curt"]
    return [CostBreakdown(*(float(r[c]) for c in cols)) for _, r in df.iterrows()]


def cmd_compare(args) -> int:
    rows = [r for p in args.inputs for r in _costs_rows(p)]
    if len(rows) != 2:
        raise ValueError(f"compare needs exactly two cost rows, got {len(rows)}")
    cmp = compare_scenarios(rows[0], rows[1])
    print(comparison_text(cmp))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cmp.to_frame().to_csv(out / "comparison.csv", index=False, float_format="%.6f")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    paths = args.scenario
    if len(paths) > 2:
        raise ValueError("pipeline takes one or two --scenario files")
    first = _apply_dsm_overrides(_scenario(paths[0], args.models), args)
    if len(paths) == 2:
        second = _apply_dsm_overrides(_scenario(paths[1], args.models), args)
    else:
        # one file: baseline as given, smart control derived from its dsm section
        first = replace(first, apply_dsm=False)
        second = replace(first, apply_dsm=True, label=f"{first.label} (smart control)")
    res = run_pipeline(first, second, args.out_dir, rel_gap=args.rel_gap,
                       node_limit=args.node_limit, dump_lp_files=args.dump_lp or False)
    print(comparison_text(res.comparison, (res.first.plan.label, res.second.plan.label)))
    print(f"total annual cost reduction {res.comparison.reduction('total'):.2f} % "
          f"({res.seconds:.1f} s)")
    return max(_limit_status(res.first.plan), _limit_status(res.second.plan))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridsmith", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def planning(sp):
        sp.add_argument("--rel-gap", type=float, default=1e-6)
        sp.add_argument("--node-limit", type=int, default=10_000)
        sp.add_argument("--dump-lp", nargs="?", const=True, default=None, metavar="PATH",
                        help="write the plan MILP in LP text format (plan: file, default "
                             "<out-dir>/plan.lp; pipeline: directory, default per scenario)")

    def dsm_opts(sp):
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--grid-step", type=float, default=None)
        sp.add_argument("--models", default=None, help="models.json from fit-dsm")

    sp = sub.add_parser("fit-dsm", help="fit zone cooling regressions")
    sp.add_argument("--samples", help="training CSV (zone,hour,T_inf,...,ase)")
    sp.add_argument("--scenario", help="generate synthetic samples from this scenario's zones")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise", type=float, default=0.0, help="sample noise std (kWh)")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_fit_dsm)

    sp = sub.add_parser("dsm", help="optimised cooling profiles for a scenario")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--out", default="profiles.csv")
    dsm_opts(sp)
    sp.set_defaults(func=cmd_dsm)

    sp = sub.add_parser("plan", help="plan one scenario")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--case", default="1", help="case label written to the tables")
    planning(sp)
    dsm_opts(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("compare", help="compare two costs.csv tables")
    sp.add_argument("inputs", nargs="+", help="costs.csv files or plan output directories")
    sp.add_argument("--out-dir", default=None)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("pipeline", help="Scenario I vs Scenario II end to end")
    sp.add_argument("--scenario", action="append", required=True,
                    help="scenario file; give twice for an explicit pair")
    sp.add_argument("--out-dir", default="gridsmith_out")
    planning(sp)
    dsm_opts(sp)
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return exit_code_for(err)


if __name__ == "__main__":
    sys.exit(main())
