"""Population-based global search: SHADE's DE/current-to-pbest/1/bin."""
from __future__ import annotations

import numpy as np

from ..core import Allowance, Heuristic, SolutionState
from ._box import distinct_indices, reflect


class SuccessHistoryDE(Heuristic):
    """Success-history adaptive DE whose population persists across initiations.

    On the first initiation one member is the incumbent and the rest are
    uniform in the box. Later initiations re-inject the incumbent over the
    worst member whenever another heuristic has moved it past the population
    best. ``fixed_f`` / ``fixed_cr`` pin the control parameters (mostly for
    tests).
    """

    name = "gs"

    def __init__(
        self,
        per_initiation_budget: float | None = None,
        seed=None,
        pop_size: int = 100,
        p_best: float = 0.1,
        memory_size: int = 10,
        fixed_f: float | None = None,
        fixed_cr: float | None = None,
    ):
        super().__init__(per_initiation_budget, seed)
        if pop_size < 4:
            raise ValueError("pop_size must be >= 4")
        self.pop_size = pop_size
        self.p_best = p_best
        self.memory_size = memory_size
        self.fixed_f = fixed_f
        self.fixed_cr = fixed_cr
        self.population: np.ndarray | None = None
        self.fitness: np.ndarray | None = None
        self.memory_f = np.full(memory_size, 0.5)
        self.memory_cr = np.full(memory_size, 0.5)
        self.memory_pos = 0
        self.archive = np.empty((0, 0))

    def _initialize(self, allowance: Allowance, solution: SolutionState) -> None:
        lower, upper = allowance.lower, allowance.upper
        self.population = self.rng.uniform(lower, upper, size=(self.pop_size, allowance.dimension))
        self.population[0] = solution.x_best
        self.fitness = np.full(self.pop_size, np.nan)
        self.fitness[0] = solution.y_best
        self.archive = np.empty((0, allowance.dimension))

    def _evaluate_pending(self, allowance: Allowance, solution: SolutionState) -> None:
        pending = np.flatnonzero(np.isnan(self.fitness))
        n = allowance.available(len(pending))
        if n == 0:
            return
        rows = pending[:n]
        self.fitness[rows] = allowance.batch(self.population[rows])
        self._offer_best(solution)

    def _offer_best(self, solution: SolutionState) -> None:
        fit = np.where(np.isnan(self.fitness), np.inf, self.fitness)
        best = int(np.argmin(fit))
        solution.offer(self.population[best], fit[best])

    def apply(self, allowance: Allowance, solution: SolutionState) -> SolutionState:
        if self.population is None:
            self._initialize(allowance, solution)
        elif not np.isnan(self.fitness).any() and solution.y_best < self.fitness.min():
            worst = int(np.argmax(self.fitness))
            self.population[worst] = solution.x_best
            self.fitness[worst] = solution.y_best
        self._evaluate_pending(allowance, solution)
        if np.isnan(self.fitness).any():
            return solution
        while allowance.available(1):
            self._generation(allowance, solution)
        return solution

    def _sample_parameters(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.pop_size
        slot = self.rng.integers(self.memory_size, size=n)
        if self.fixed_cr is not None:
            cr = np.full(n, float(self.fixed_cr))
        else:
            cr = np.clip(self.rng.normal(self.memory_cr[slot], 0.1), 0.0, 1.0)
        if self.fixed_f is not None:
            f = np.full(n, float(self.fixed_f))
        else:
            loc = self.memory_f[slot]
            f = loc + 0.1 * self.rng.standard_cauchy(n)
            bad = f <= 0
            while bad.any():
                f[bad] = loc[bad] + 0.1 * self.rng.standard_cauchy(int(bad.sum()))
                bad = f <= 0
            f = np.minimum(f, 1.0)
        return f, cr

    def _generation(self, allowance: Allowance, solution: SolutionState) -> None:
        pop, fit = self.population, self.fitness
        n, dim = pop.shape
        rows = np.arange(n)
        f, cr = self._sample_parameters()

        top = max(2, int(round(self.p_best * n)))
        order = np.argsort(fit, kind="stable")
        pbest = pop[order[self.rng.integers(top, size=n)]]
        r1 = distinct_indices(self.rng, n, n, [rows])
        union = np.vstack([pop, self.archive]) if len(self.archive) else pop
        r2 = distinct_indices(self.rng, n, len(union), [rows, r1])
        fc = f[:, None]
        mutant = pop + fc * (pbest - pop) + fc * (pop[r1] - union[r2])
        mask = self.rng.random((n, dim)) < cr[:, None]
        mask[rows, self.rng.integers(dim, size=n)] = True
        trial = reflect(np.where(mask, mutant, pop), allowance.lower, allowance.upper)

        m = allowance.available(n)
        if m == 0:
            return
        values = allowance.batch(trial[:m])
        parent = fit[:m]
        improved = np.flatnonzero(values < parent)
        replace = np.flatnonzero(values <= parent)

        if improved.size:
            self._archive_add(pop[improved])
            self._update_memory(f[improved], cr[improved], parent[improved] - values[improved])
        pop[replace] = trial[replace]
        fit[replace] = values[replace]
        self._offer_best(solution)

    def _archive_add(self, parents: np.ndarray) -> None:
        archive = np.vstack([self.archive, parents])
        excess = len(archive) - self.pop_size
        if excess > 0:
            drop = self.rng.choice(len(archive), size=excess, replace=False)
            archive = np.delete(archive, drop, axis=0)
        self.archive = archive

    def _update_memory(self, f: np.ndarray, cr: np.ndarray, gain: np.ndarray) -> None:
        total = gain.sum()
        if not total > 0:
            return
        w = gain / total
        self.memory_f[self.memory_pos] = np.sum(w * f * f) / np.sum(w * f)
        self.memory_cr[self.memory_pos] = np.sum(w * cr)
        self.memory_pos = (self.memory_pos + 1) % self.memory_size

    def snapshot(self) -> dict:
        return {
            "population": None if self.population is None else self.population.copy(),
            "fitness": None if self.fitness is None else self.fitness.copy(),
            "memory_f": self.memory_f.copy(),
            "memory_cr": self.memory_cr.copy(),
            "memory_pos": self.memory_pos,
            "archive": self.archive.copy(),
            "rng": self.rng.bit_generator.state,
        }
