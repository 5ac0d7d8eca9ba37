"""Windowed efficiency estimation with Boltzmann exploration.

The controller keeps the last ``w`` efficiency records, rescales them jointly
to [0, 1], averages them per action and samples the next heuristic from a
softmax over those averages. An action with no record in the window has an
infinite mean and is taken before anything else.
"""
from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Allowance,
    ContractViolation,
    EfficiencyRecord,
    Heuristic,
    Objective,
    ResourceKind,
    ResourceMeter,
    RunRecord,
    SolutionState,
    consume,
    record_initiation,
)

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

INFINITE = math.inf


class WindowMemory:
    """FIFO buffer holding at most ``capacity`` efficiency records."""

    def __init__(self, capacity: int, entries: Iterable[EfficiencyRecord] = ()):
        if capacity < 1:
            raise ContractViolation(f"window capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self._entries: deque[EfficiencyRecord] = deque(maxlen=self.capacity)
        for rec in entries:
            self.add(rec)

    def add(self, record: EfficiencyRecord) -> None:
        self._entries.append(record)

    @property
    def entries(self) -> list[EfficiencyRecord]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)


def parse_tau(value) -> float:
    """Accept a float or a fraction string such as ``"1/5"``."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


@dataclass(frozen=True)
class PolicyConfig:
    tau: float = 0.2
    window: int = 5
    action_count: int = 3

    def __post_init__(self):
        if not self.tau > 0:
            raise ContractViolation(f"tau must be positive, got {self.tau}")
        if self.window < 1:
            raise ContractViolation(f"window must be >= 1, got {self.window}")
        if self.action_count < 1:
            raise ContractViolation(f"action_count must be >= 1, got {self.action_count}")

    @classmethod
    def from_file(cls, path: str | Path, action_count: int = 3) -> "PolicyConfig":
        """Read ``tau`` and ``window`` from a TOML or JSON file.

        Keys may sit at the top level or under a ``[policy]`` table.
        """
        path = Path(path)
        if path.suffix.lower() == ".json":
            data = json.loads(path.read_text())
        else:
            data = tomllib.loads(path.read_text())
        data = data.get("policy", data)
        return cls(
            tau=parse_tau(data.get("tau", 0.2)),
            window=int(data.get("window", 5)),
            action_count=int(data.get("action_count", action_count)),
        )


def normalize_window(memory: WindowMemory | Iterable[EfficiencyRecord]) -> list[tuple[int, float]]:
    """Map all efficiencies in the window jointly onto [0, 1].

    With no spread (including a single record) every value becomes 0.5.
    """
    records = list(memory)
    if not records:
        return []
    effs = [r.efficiency for r in records]
    lo, hi = min(effs), max(effs)
    span = hi - lo
    if span <= 0:
        return [(r.action_id, 0.5) for r in records]
    return [(r.action_id, (e - lo) / span) for r, e in zip(records, effs)]


def action_means(normalized: Sequence[tuple[int, float]], action_count: int) -> list[float]:
    sums = [0.0] * action_count
    counts = [0] * action_count
    for action_id, value in normalized:
        sums[action_id] += value
        counts[action_id] += 1
    return [s / c if c else INFINITE for s, c in zip(sums, counts)]


def softmax(values: Sequence[float], tau: float) -> list[float]:
    if not tau > 0:
        raise ContractViolation(f"tau must be positive, got {tau}")
    top = max(values)
    weights = [math.exp((v - top) / tau) for v in values]
    total = sum(weights)
    return [w / total for w in weights]


def action_probabilities(means: Sequence[float], tau: float) -> list[float]:
    """Selection distribution implied by ``means``, including the infinite-mean rule."""
    unseen = [i for i, m in enumerate(means) if m == INFINITE]
    if unseen:
        p = 1.0 / len(unseen)
        return [p if m == INFINITE else 0.0 for m in means]
    return softmax(means, tau)


def sample_action(means: Sequence[float], tau: float, rng: np.random.Generator) -> int:
    if not tau > 0:
        raise ContractViolation(f"tau must be positive, got {tau}")
    unseen = [i for i, m in enumerate(means) if m == INFINITE]
    if unseen:
        if len(unseen) == 1:
            return unseen[0]
        return unseen[int(rng.integers(len(unseen)))]
    probs = softmax(means, tau)
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


class TERPolicy:
    """Temporal efficiency estimation: window + normalization + softmax."""

    name = "ter"

    def __init__(self, config: PolicyConfig, rng: np.random.Generator | None = None):
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng()
        self.memory = WindowMemory(config.window)

    def means(self) -> list[float]:
        return action_means(normalize_window(self.memory), self.config.action_count)

    def select(self) -> int:
        return sample_action(self.means(), self.config.tau, self.rng)

    def update(self, record: EfficiencyRecord) -> None:
        self.memory.add(record)


class RandomPolicy:
    """Uniform choice among actions; ignores feedback."""

    name = "random"

    def __init__(self, action_count: int, rng: np.random.Generator | None = None):
        if action_count < 1:
            raise ContractViolation("action_count must be >= 1")
        self.action_count = action_count
        self.rng = rng if rng is not None else np.random.default_rng()

    def select(self) -> int:
        return random_policy_step(self.action_count, self.rng)

    def update(self, record: EfficiencyRecord) -> None:
        pass


def random_policy_step(action_count: int, rng: np.random.Generator) -> int:
    if action_count < 1:
        raise ContractViolation("action_count must be >= 1")
    if action_count == 1:
        return 0
    return int(rng.integers(action_count))


class FixedPolicy:
    """Always the same action; the single-heuristic baseline."""

    def __init__(self, action_id: int):
        self.action_id = int(action_id)
        self.name = f"single:{action_id}"

    def select(self) -> int:
        return self.action_id

    def update(self, record: EfficiencyRecord) -> None:
        pass


def optimize(
    objective: Objective,
    heuristics: Sequence[Heuristic],
    meter: ResourceMeter,
    policy,
    init: SolutionState,
    seed: int | None = None,
    config: dict | None = None,
) -> tuple[SolutionState, RunRecord]:
    """Run the initiation loop with an arbitrary action policy.

    ``init`` must already be evaluated and its cost charged to ``meter``.
    Every heuristic gets ``min(its budget, remaining)`` per initiation.
    """
    if not heuristics:
        raise ContractViolation("at least one heuristic is required")
    state = init.copy()
    run = RunRecord(seed=seed, config=dict(config or {}))
    run.curve.append((float(meter.consumed), state.y_best))
    dim = objective.dimension

    while not meter.exhausted:
        if meter.kind is ResourceKind.EVALUATIONS and meter.remaining < 1:
            break
        action = policy.select()
        heuristic = heuristics[action]
        limit = min(heuristic.budget_for(dim), meter.remaining)
        allowance = Allowance(objective, limit, meter.kind)
        before = state.copy()
        state = heuristic.apply(allowance, state)
        cost = allowance.spent
        if not cost > 0:
            raise RuntimeError(
                f"heuristic {heuristic.name!r} (action {action}) consumed no resources; "
                "the loop would never terminate"
            )
        record = record_initiation(before, state, cost, action)
        policy.update(record)
        consume(meter, cost)
        run.action_sequence.append(action)
        run.improvements.append(record.improvement)
        run.costs.append(record.cost)
        run.curve.append((float(meter.consumed), state.y_best))
        log.debug("action=%d cost=%g y_best=%.6e", action, cost, state.y_best)

    return state, run.finalize()


def ter_optimize(
    objective: Objective,
    heuristics: Sequence[Heuristic],
    meter: ResourceMeter,
    config: PolicyConfig,
    init: SolutionState,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> tuple[SolutionState, RunRecord]:
    if len(heuristics) != config.action_count:
        raise ContractViolation(
            f"{len(heuristics)} heuristics given but action_count is {config.action_count}"
        )
    policy = TERPolicy(config, rng)
    snapshot = {"policy": "ter", "tau": config.tau, "window": config.window,
                "heuristics": [h.name for h in heuristics]}
    return optimize(objective, heuristics, meter, policy, init, seed=seed, config=snapshot)
