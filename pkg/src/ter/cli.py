"""Command line entry point: ``ter run | bounds | solve-hparams | report``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bounds import exploration_bounds, solve_hyperparameters
from .controller import PolicyConfig, parse_tau, tomllib
from .harness.experiment import (
    ExperimentConfig,
    ProblemSpec,
    check_writable,
    load_results,
    run_experiment,
)
from .harness.alignment import AlignmentScoring
from .harness.report import build_report, format_summary, write_report


def _split(values: list[str] | None) -> list[str]:
    out: list[str] = []
    for v in values or []:
        out.extend(s.strip() for s in v.split(",") if s.strip())
    return out


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if p.suffix.lower() == ".json":
        return json.loads(p.read_text())
    return tomllib.loads(p.read_text())


def _cmd_run(args) -> int:
    file_cfg = _load_config_file(args.config)
    policy_cfg = file_cfg.get("policy", {})
    tau = parse_tau(args.tau if args.tau is not None else policy_cfg.get("tau", 0.2))
    window = args.window if args.window is not None else int(policy_cfg.get("window", 5))
    heuristics = _split(args.heuristics) or list(file_cfg.get("heuristics", ["ls1", "cc", "gs"]))
    overrides = {name: dict(file_cfg[name]) for name in ("ls1", "cc", "gs") if name in file_cfg}

    problems = [
        ProblemSpec(fn, dim, args.shift_seed, args.shift_file)
        for fn in _split(args.problem)
        for dim in args.dim
    ]
    if not problems:
        raise ValueError("at least one --problem and --dim are required")

    config = ExperimentConfig(
        problems=problems,
        policies=_split(args.policy) or ["ter"],
        heuristics=heuristics,
        tau=tau,
        window=window,
        budget_factor=args.budget_factor,
        budget=args.budget,
        initiation_factor=args.initiation_factor,
        initiation_budget=args.initiation_budget,
        resource=args.resource,
        runs=args.runs,
        base_seed=args.seed,
        out_dir=args.out,
        heuristic_overrides=overrides,
    )
    _, report = run_experiment(config, workers=args.workers)
    print(format_summary(report))
    if args.out:
        print(f"records and report written to {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    tau = parse_tau(args.tau)
    b = exploration_bounds(args.actions, args.window, tau)
    print(f"|A|={args.actions} w={args.window} tau={tau:g}")
    print(f"  printed lower bound     : {b.lower:.6f}")
    print(f"  printed upper bound     : {b.upper:.7f}")
    print(f"  1 - printed lower bound : {b.complement_lower:.6f}")
    print(json.dumps({"actions": args.actions, "window": args.window, "tau": tau, **b.as_dict()}))
    return 0


def _cmd_solve(args) -> int:
    pairs = solve_hyperparameters(args.pmin, args.pmax, args.actions)
    if not pairs:
        print("no feasible (tau, window) pair")
    for tau, window in pairs:
        print(f"tau=1/{round(1 / tau)} ({tau:.6g})  window={window}")
    print(json.dumps({"pmin": args.pmin, "pmax": args.pmax, "actions": args.actions,
                      "candidates": [{"tau": t, "window": w} for t, w in pairs]}))
    return 0


def _cmd_report(args) -> int:
    results = load_results(args.in_dir)
    out = Path(args.out) if args.out else Path(args.in_dir)
    check_writable(out)
    scoring = AlignmentScoring(args.match, args.mismatch, args.gap)
    report = build_report(results, scoring, args.alpha)
    target = write_report(report, results, out)
    print(format_summary(report))
    print(f"report written to {target}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ter", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded experiments and write records + report")
    run.add_argument("--problem", action="append", required=True,
                     help="benchmark name(s), repeatable or comma separated")
    run.add_argument("--dim", type=int, action="append", required=True)
    run.add_argument("--budget-factor", type=float, default=5000.0, help="maxFEs = factor * D")
    run.add_argument("--budget", type=float, default=None, help="absolute budget, overrides the factor")
    run.add_argument("--initiation-factor", type=float, default=25.0,
                     help="per-initiation budget = factor * D")
    run.add_argument("--initiation-budget", type=float, default=None)
    run.add_argument("--resource", choices=["evaluations", "wall_time_ms"], default="evaluations")
    run.add_argument("--policy", action="append",
                     help="ter, random or single:<heuristic>; repeatable")
    run.add_argument("--heuristics", action="append", help="action set, e.g. ls1,cc,gs")
    run.add_argument("--tau", default=None, help="softmax temperature, e.g. 0.2 or 1/5")
    run.add_argument("--window", type=int, default=None)
    run.add_argument("--runs", type=int, default=20)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--shift-seed", type=int, default=0)
    run.add_argument("--shift-file", default=None)
    run.add_argument("--config", default=None, help="TOML/JSON with [policy], [ls1], [cc], [gs]")
    run.add_argument("--workers", type=int, default=None, help="defaults to $TER_WORKERS or 1")
    run.add_argument("--out", default=None)
    run.set_defaults(func=_cmd_run)

    bounds = sub.add_parser("bounds", help="evaluate the exploration bound formulas")
    bounds.add_argument("--actions", type=int, required=True)
    bounds.add_argument("--tau", required=True)
    bounds.add_argument("--window", type=int, required=True)
    bounds.set_defaults(func=_cmd_bounds)

    solve = sub.add_parser("solve-hparams", help="find (tau, window) for an exploitation interval")
    solve.add_argument("--pmin", type=float, required=True)
    solve.add_argument("--pmax", type=float, required=True)
    solve.add_argument("--actions", type=int, required=True)
    solve.set_defaults(func=_cmd_solve)

    report = sub.add_parser("report", help="rebuild the report from persisted run records")
    report.add_argument("--in", dest="in_dir", required=True)
    report.add_argument("--out", default=None)
    report.add_argument("--alpha", type=float, default=0.05)
    report.add_argument("--match", type=float, default=2.0)
    report.add_argument("--mismatch", type=float, default=-1.0)
    report.add_argument("--gap", type=float, default=-1.0)
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a diagnostic + exit code
        print(f"ter: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
