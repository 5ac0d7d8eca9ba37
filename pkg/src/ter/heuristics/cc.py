"""Cooperative coevolution with random grouping and a DE/rand/1/bin optimizer."""
from __future__ import annotations

import math

import numpy as np

from ..core import Allowance, Heuristic, SolutionState
from ._box import distinct_indices, reflect


def random_groups(rng: np.random.Generator, dimension: int, group_size: int) -> list[np.ndarray]:
    """Partition ``range(dimension)`` into random disjoint groups of ``group_size``."""
    perm = rng.permutation(dimension)
    return [np.sort(perm[i : i + group_size]) for i in range(0, dimension, group_size)]


def embed(context: np.ndarray, indices: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Copies of ``context`` with ``indices`` replaced by each row of ``values``."""
    values = np.atleast_2d(values)
    full = np.repeat(context[None, :], len(values), axis=0)
    full[:, indices] = values
    return full


class CooperativeCoevolution(Heuristic):
    """Random-grouping CC around the incumbent as context vector.

    Each group visit re-evaluates the sub-population inside the current
    context (one member is seeded with the context's own coordinates), runs
    ``generations_per_group`` DE generations on the group's coordinates and
    writes any improvement straight back into the incumbent. A fresh random
    decomposition is drawn once every group has been visited.
    """

    name = "cc"

    def __init__(
        self,
        per_initiation_budget: float | None = None,
        seed=None,
        group_size: int | None = None,
        pop_size: int = 50,
        f: float = 0.5,
        cr: float = 0.9,
        generations_per_group: int = 10,
    ):
        super().__init__(per_initiation_budget, seed)
        if pop_size < 4:
            raise ValueError("DE/rand/1 needs pop_size >= 4")
        self.group_size = group_size
        self.pop_size = pop_size
        self.f = f
        self.cr = cr
        self.generations_per_group = generations_per_group
        self.population: np.ndarray | None = None
        self.groups: list[np.ndarray] = []
        self.group_cursor = 0

    def resolved_group_size(self, dimension: int) -> int:
        if self.group_size is not None:
            return max(1, min(self.group_size, dimension))
        return max(1, min(100, math.ceil(dimension / 2)))

    def apply(self, allowance: Allowance, solution: SolutionState) -> SolutionState:
        lower, upper = allowance.lower, allowance.upper
        dim = allowance.dimension
        if self.population is None:
            self.population = self.rng.uniform(lower, upper, size=(self.pop_size, dim))
        while allowance.available(1):
            if self.group_cursor >= len(self.groups):
                self.groups = random_groups(self.rng, dim, self.resolved_group_size(dim))
                self.group_cursor = 0
            idx = self.groups[self.group_cursor]
            self.group_cursor += 1
            self._evolve_group(allowance, solution, idx)
        return solution

    def _evaluate(self, allowance, solution, idx, members):
        """Evaluate as many rows of ``members`` as the allowance permits."""
        n = allowance.available(len(members))
        if n == 0:
            return np.empty(0)
        values = allowance.batch(embed(solution.x_best, idx, members[:n]))
        best = int(np.argmin(values))
        if values[best] < solution.y_best:
            x = solution.x_best.copy()
            x[idx] = members[best]
            solution.x_best = x
            solution.y_best = float(values[best])
        return values

    def _evolve_group(self, allowance: Allowance, solution: SolutionState, idx: np.ndarray) -> None:
        np_ = self.pop_size
        lo, hi = allowance.lower[idx], allowance.upper[idx]
        sub = self.population[:, idx].copy()
        keep = int(self.rng.integers(np_))
        sub[keep] = solution.x_best[idx]
        fitness = np.full(np_, np.inf)
        fitness[keep] = solution.y_best
        others = np.delete(np.arange(np_), keep)
        values = self._evaluate(allowance, solution, idx, sub[others])
        fitness[others[: len(values)]] = values

        rows = np.arange(np_)
        for _ in range(self.generations_per_group):
            if not allowance.available(1):
                break
            r1 = distinct_indices(self.rng, np_, np_, [rows])
            r2 = distinct_indices(self.rng, np_, np_, [rows, r1])
            r3 = distinct_indices(self.rng, np_, np_, [rows, r1, r2])
            mutant = sub[r1] + self.f * (sub[r2] - sub[r3])
            mask = self.rng.random(sub.shape) < self.cr
            mask[rows, self.rng.integers(len(idx), size=np_)] = True
            trial = reflect(np.where(mask, mutant, sub), lo, hi)
            values = self._evaluate(allowance, solution, idx, trial)
            n = len(values)
            better = values <= fitness[:n]
            sub[:n][better] = trial[:n][better]
            fitness[:n][better] = values[better]

        self.population[:, idx] = sub

    def snapshot(self) -> dict:
        return {
            "population": None if self.population is None else self.population.copy(),
            "groups": [g.copy() for g in self.groups],
            "group_cursor": self.group_cursor,
            "rng": self.rng.bit_generator.state,
        }
