"""Resource accounting, incumbent tracking and the heuristic contract.

Everything here is direction-fixed to minimization: an improvement is
``y_before - y_after`` and is therefore never negative.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np


class ContractViolation(ValueError):
    """Raised when a caller breaks a documented precondition."""


class ResourceKind(str, enum.Enum):
    EVALUATIONS = "evaluations"
    WALL_TIME_MS = "wall_time_ms"


@dataclass
class SolutionState:
    """Incumbent best point and its objective value."""

    x_best: np.ndarray
    y_best: float

    def copy(self) -> "SolutionState":
        return SolutionState(np.array(self.x_best, dtype=float, copy=True), float(self.y_best))

    def offer(self, x: np.ndarray, y: float) -> bool:
        """Replace the incumbent if ``y`` is strictly better; return whether it was."""
        if y < self.y_best:
            self.x_best = np.array(x, dtype=float, copy=True)
            self.y_best = float(y)
            return True
        return False


@dataclass
class ResourceMeter:
    budget: float
    kind: ResourceKind = ResourceKind.EVALUATIONS
    consumed: float = 0.0

    def __post_init__(self) -> None:
        if not self.budget > 0:
            raise ContractViolation(f"budget must be positive, got {self.budget}")
        self.kind = ResourceKind(self.kind)

    @property
    def remaining(self) -> float:
        return max(self.budget - self.consumed, 0.0)

    @property
    def exhausted(self) -> bool:
        return self.consumed >= self.budget


def consume(meter: ResourceMeter, amount: float) -> ResourceMeter:
    """Charge ``amount`` to the meter.

    Going over budget is allowed here; the optimization loop checks
    :attr:`ResourceMeter.exhausted` before starting another initiation.
    """
    if amount < 0:
        raise ContractViolation(f"cannot consume a negative amount ({amount})")
    meter.consumed += amount
    return meter


@dataclass(frozen=True)
class EfficiencyRecord:
    action_id: int
    improvement: float
    cost: float
    efficiency: float


def record_initiation(
    state_before: SolutionState,
    state_after: SolutionState,
    cost: float,
    action_id: int,
) -> EfficiencyRecord:
    if not cost > 0:
        raise ContractViolation(f"initiation cost must be positive, got {cost}")
    improvement = float(state_before.y_best) - float(state_after.y_best)
    if improvement < 0:
        raise ContractViolation(
            f"incumbent got worse ({state_before.y_best} -> {state_after.y_best})"
        )
    return EfficiencyRecord(int(action_id), improvement, float(cost), improvement / cost)


class Objective:
    """A box-bounded scalar function with an evaluation counter.

    ``func`` maps a 1-D array to a float. If ``batch_func`` is given it maps
    an ``(n, D)`` array to ``n`` values and is used for population steps.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], float],
        lower: Sequence[float] | np.ndarray,
        upper: Sequence[float] | np.ndarray,
        batch_func: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str = "objective",
    ):
        self.func = func
        self.batch_func = batch_func
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ContractViolation("lower and upper bounds must be 1-D arrays of equal length")
        if np.any(self.upper <= self.lower):
            raise ContractViolation("every upper bound must exceed its lower bound")
        self.name = name
        self.evaluations = 0

    @property
    def dimension(self) -> int:
        return self.lower.size

    def __call__(self, x: np.ndarray) -> float:
        self.evaluations += 1
        return float(self.func(x))

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        self.evaluations += len(xs)
        if self.batch_func is not None:
            return np.asarray(self.batch_func(xs), dtype=float)
        return np.fromiter((self.func(x) for x in xs), dtype=float, count=len(xs))


class Allowance:
    """Resource gate for one heuristic initiation.

    Heuristics evaluate through the allowance, never through the objective
    directly, so the controller knows exactly what an initiation cost. For
    evaluation budgets the gate is exact; for wall-time budgets it is checked
    before each call and the final batch may run slightly over.
    """

    def __init__(
        self,
        objective: Objective,
        limit: float,
        kind: ResourceKind = ResourceKind.EVALUATIONS,
        clock: Callable[[], float] = time.monotonic,
    ):
        if not limit > 0:
            raise ContractViolation(f"allowance must be positive, got {limit}")
        self.objective = objective
        self.limit = limit
        self.kind = ResourceKind(kind)
        self._clock = clock
        self._start = clock()
        self.evaluations = 0
        self._cap = int(math.floor(limit)) if self.kind is ResourceKind.EVALUATIONS else None

    @property
    def lower(self) -> np.ndarray:
        return self.objective.lower

    @property
    def upper(self) -> np.ndarray:
        return self.objective.upper

    @property
    def dimension(self) -> int:
        return self.objective.dimension

    def _elapsed_ms(self) -> float:
        return (self._clock() - self._start) * 1000.0

    def available(self, n: int = 1) -> int:
        """How many of ``n`` requested evaluations may be spent right now."""
        if self._cap is not None:
            left = self._cap - self.evaluations
            return n if n <= left else max(left, 0)
        return n if self._elapsed_ms() < self.limit else 0

    @property
    def exhausted(self) -> bool:
        return self.available(1) == 0

    @property
    def spent(self) -> float:
        """Cost of the initiation so far, in the meter's resource unit."""
        if self.kind is ResourceKind.EVALUATIONS:
            return float(self.evaluations)
        return self._elapsed_ms()

    def __call__(self, x: np.ndarray) -> float:
        if self._cap is not None:
            if self.evaluations >= self._cap:
                raise ContractViolation("allowance exhausted")
        elif self._elapsed_ms() >= self.limit:
            raise ContractViolation("allowance exhausted")
        self.evaluations += 1
        return self.objective(x)

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        if self.available(len(xs)) < len(xs):
            raise ContractViolation("batch exceeds remaining allowance")
        self.evaluations += len(xs)
        return self.objective.batch(xs)


class Heuristic:
    """Base class for articulated heuristics.

    A heuristic owns its private state and its own random stream; the only
    shared thing it touches is the :class:`SolutionState` handed to
    :meth:`apply`. ``per_initiation_budget`` of ``None`` means "25 evaluations
    per dimension", resolved on first use.
    """

    name = "heuristic"

    def __init__(self, per_initiation_budget: float | None = None, seed: Any = None):
        self.per_initiation_budget = per_initiation_budget
        self.rng = np.random.default_rng(seed)

    def budget_for(self, dimension: int) -> float:
        if self.per_initiation_budget is None:
            return 25.0 * dimension
        return float(self.per_initiation_budget)

    def apply(self, allowance: Allowance, solution: SolutionState) -> SolutionState:
        raise NotImplementedError

    def snapshot(self) -> dict:
        """Deep copy of the private state, for comparisons in tests."""
        raise NotImplementedError


@dataclass
class RunRecord:
    action_sequence: list[int] = field(default_factory=list)
    curve: list[tuple[float, float]] = field(default_factory=list)
    overall_improvement: float = 0.0
    overall_efficiency: float = 0.0
    seed: int | None = None
    config: dict = field(default_factory=dict)
    improvements: list[float] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)

    @property
    def y_initial(self) -> float:
        return self.curve[0][1]

    @property
    def y_final(self) -> float:
        return self.curve[-1][1]

    @property
    def consumed(self) -> float:
        return self.curve[-1][0]

    def finalize(self) -> "RunRecord":
        self.overall_improvement = self.y_initial - self.y_final
        self.overall_efficiency = (
            self.overall_improvement / self.consumed if self.consumed > 0 else 0.0
        )
        return self

    def to_dict(self) -> dict:
        return {
            "action_sequence": [int(a) for a in self.action_sequence],
            "curve": [[float(c), float(y)] for c, y in self.curve],
            "overall_improvement": self.overall_improvement,
            "overall_efficiency": self.overall_efficiency,
            "seed": self.seed,
            "config": self.config,
            "improvements": self.improvements,
            "costs": self.costs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            action_sequence=[int(a) for a in data["action_sequence"]],
            curve=[(float(c), float(y)) for c, y in data["curve"]],
            overall_improvement=float(data["overall_improvement"]),
            overall_efficiency=float(data["overall_efficiency"]),
            seed=data.get("seed"),
            config=data.get("config", {}),
            improvements=[float(v) for v in data.get("improvements", [])],
            costs=[float(v) for v in data.get("costs", [])],
        )

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load_json(cls, path: str | Path) -> "RunRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save_curve_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["consumed", "y"])
            for consumed, y in self.curve:
                writer.writerow([repr(float(consumed)), repr(float(y))])
