"""Seeded experiment runs: TER, uniform-random and single-heuristic policies."""
from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ..benchmarks import make_problem
from ..controller import FixedPolicy, PolicyConfig, RandomPolicy, TERPolicy, optimize
from ..core import ContractViolation, ResourceKind, ResourceMeter, RunRecord, SolutionState, consume
from ..heuristics import REGISTRY, build_heuristic

log = logging.getLogger(__name__)

WORKERS_ENV = "TER_WORKERS"


@dataclass(frozen=True)
class ProblemSpec:
    function: str
    dimension: int
    shift_seed: int | None = 0
    shift_file: str | None = None

    @property
    def key(self) -> str:
        return f"{self.function}_D{self.dimension}"


@dataclass
class ExperimentConfig:
    problems: list[ProblemSpec]
    policies: list[str] = field(default_factory=lambda: ["ter"])
    heuristics: list[str] = field(default_factory=lambda: ["ls1", "cc", "gs"])
    tau: float = 0.2
    window: int = 5
    budget_factor: float = 5000.0
    budget: float | None = None
    initiation_factor: float = 25.0
    initiation_budget: float | None = None
    resource: str = ResourceKind.EVALUATIONS.value
    runs: int = 20
    base_seed: int = 0
    out_dir: str | None = None
    heuristic_overrides: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        for h in self.heuristics:
            if h not in REGISTRY:
                raise ContractViolation(f"unknown heuristic {h!r}")
        for p in self.policies:
            parse_policy(p, self.heuristics)
        if self.runs < 1:
            raise ContractViolation("runs must be >= 1")
        if self.resource == ResourceKind.WALL_TIME_MS.value and self.budget is None:
            raise ContractViolation("wall-time experiments need an absolute budget")

    def budget_for(self, dimension: int) -> float:
        if self.budget is not None:
            return float(self.budget)
        return self.budget_factor * dimension

    def initiation_budget_for(self, dimension: int) -> float:
        if self.initiation_budget is not None:
            return float(self.initiation_budget)
        return self.initiation_factor * dimension

    def snapshot(self) -> dict:
        data = asdict(self)
        data["problems"] = [asdict(p) for p in self.problems]
        return data


def parse_policy(policy: str, heuristics: list[str]) -> tuple[str, int | None]:
    """``"ter"`` / ``"random"`` / ``"single:<heuristic>"`` -> (kind, action index)."""
    if policy in ("ter", "random"):
        return policy, None
    if policy.startswith("single:"):
        name = policy.split(":", 1)[1]
        if name not in heuristics:
            raise ContractViolation(f"{policy!r} names a heuristic outside the action set {heuristics}")
        return "single", heuristics.index(name)
    raise ContractViolation(f"unknown policy {policy!r}")


def run_single(config: ExperimentConfig, problem: ProblemSpec, policy: str, run_index: int) -> RunRecord:
    """One seeded run. Run ``i`` uses seed ``base_seed + i`` for every policy,
    so policies share the initial point and the heuristics' random streams."""
    seed = config.base_seed + run_index
    objective = make_problem(problem.function, problem.dimension, problem.shift_seed, problem.shift_file)
    streams = np.random.SeedSequence(seed).spawn(2 + len(config.heuristics))
    init_rng = np.random.default_rng(streams[0])
    policy_rng = np.random.default_rng(streams[1])

    kind = ResourceKind(config.resource)
    per_initiation = config.initiation_budget_for(problem.dimension)
    heuristics = []
    for i, name in enumerate(config.heuristics):
        overrides = dict(config.heuristic_overrides.get(name, {}))
        overrides.setdefault("per_initiation_budget", per_initiation)
        heuristics.append(build_heuristic(name, seed=streams[2 + i], **overrides))

    meter = ResourceMeter(config.budget_for(problem.dimension), kind)
    # initial point drawn uniformly in the box, charged as one evaluation
    x0 = init_rng.uniform(objective.lower, objective.upper)
    if kind is ResourceKind.EVALUATIONS:
        y0 = objective(x0)
        consume(meter, 1)
    else:
        t0 = time.monotonic()
        y0 = objective(x0)
        consume(meter, (time.monotonic() - t0) * 1000.0)

    kind_name, action = parse_policy(policy, config.heuristics)
    if kind_name == "ter":
        pol = TERPolicy(PolicyConfig(config.tau, config.window, len(heuristics)), policy_rng)
    elif kind_name == "random":
        pol = RandomPolicy(len(heuristics), policy_rng)
    else:
        pol = FixedPolicy(action)

    snapshot = {
        "problem": asdict(problem),
        "policy": policy,
        "heuristics": list(config.heuristics),
        "tau": config.tau,
        "window": config.window,
        "budget": meter.budget,
        "initiation_budget": per_initiation,
        "resource": kind.value,
        "run_index": run_index,
    }
    _, record = optimize(objective, heuristics, meter, pol, SolutionState(x0, y0), seed=seed, config=snapshot)
    return record


def _run_task(args) -> tuple[str, str, int, dict]:
    config, problem, policy, run_index = args
    record = run_single(config, problem, policy, run_index)
    return problem.key, policy, run_index, record.to_dict()


def policy_dirname(policy: str) -> str:
    return policy.replace(":", "-")


def record_path(out_dir: Path, problem_key: str, policy: str, run_index: int) -> Path:
    return out_dir / "runs" / problem_key / policy_dirname(policy) / f"run_{run_index:03d}.json"


def check_writable(out_dir: Path) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc


Results = dict[tuple[str, str], list[RunRecord]]


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> tuple[Results, dict]:
    """Run every (problem, policy, run) cell, persist records, return them with the report."""
    from .report import build_report, write_report

    out_dir = Path(config.out_dir) if config.out_dir else None
    if out_dir is not None:
        check_writable(out_dir)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))

    tasks = [
        (config, problem, policy, i)
        for problem in config.problems
        for policy in config.policies
        for i in range(config.runs)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_task, tasks))
    else:
        outputs = [_run_task(t) for t in tasks]

    results: Results = {}
    for key, policy, run_index, data in sorted(outputs, key=lambda o: (o[0], o[1], o[2])):
        results.setdefault((key, policy), []).append(RunRecord.from_dict(data))

    report = build_report(results)
    if out_dir is not None:
        (out_dir / "config.json").write_text(json.dumps(config.snapshot(), indent=1))
        for (key, policy), records in results.items():
            for i, record in enumerate(records):
                path = record_path(out_dir, key, policy, i)
                path.parent.mkdir(parents=True, exist_ok=True)
                record.save_json(path)
                record.save_curve_csv(path.with_suffix(".csv"))
        write_report(report, results, out_dir)
    return results, report


def load_results(in_dir: str | Path) -> Results:
    """Read back every persisted run record under ``in_dir/runs``."""
    root = Path(in_dir) / "runs"
    if not root.is_dir():
        raise FileNotFoundError(f"no run records under {root}")
    results: Results = {}
    for path in sorted(root.glob("*/*/run_*.json")):
        record = RunRecord.load_json(path)
        key = path.parent.parent.name
        policy = record.config.get("policy", path.parent.name)
        results.setdefault((key, policy), []).append(record)
    return results


def errors(records: Iterable[RunRecord]) -> np.ndarray:
    return np.array([r.y_final for r in records])
