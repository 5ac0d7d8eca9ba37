"""Coordinate line search in the style of MTS-LS1."""
from __future__ import annotations

import numpy as np

from ..core import Allowance, Heuristic, SolutionState


class LS1(Heuristic):
    """Probe ``x_i - SR_i`` then ``x_i + SR_i / 2`` on each coordinate in turn.

    A pass with no improvement anywhere halves every search range; a range
    that falls below ``min_range`` of its box width is reset. The dimension
    cursor survives between initiations so a budget boundary does not keep
    restarting at coordinate 0.
    """

    name = "ls1"

    def __init__(
        self,
        per_initiation_budget: float | None = None,
        seed=None,
        initial_range: float = 0.2,
        min_range: float = 1e-15,
    ):
        super().__init__(per_initiation_budget, seed)
        if not 0 < initial_range <= 0.5:
            raise ValueError("initial_range must be in (0, 0.5]")
        self.initial_range = initial_range
        self.min_range = min_range
        self.search_range: np.ndarray | None = None
        self.cursor = 0
        self.improved_in_pass = False
        self.pending_half_step = False

    def _setup(self, lower: np.ndarray, upper: np.ndarray) -> None:
        self._width = upper - lower
        self._initial = self.initial_range * self._width
        self.search_range = self._initial.copy()

    def _end_of_pass(self) -> None:
        if not self.improved_in_pass:
            self.search_range = self.search_range / 2.0
            small = self.search_range < self.min_range * self._width
            self.search_range[small] = self._initial[small]
        self.improved_in_pass = False

    def apply(self, allowance: Allowance, solution: SolutionState) -> SolutionState:
        if self.search_range is None:
            self._setup(allowance.lower, allowance.upper)
        lower = allowance.lower.tolist()
        upper = allowance.upper.tolist()
        sr = self.search_range.tolist()
        x = solution.x_best.copy()
        y = solution.y_best
        dim = x.size

        while allowance.available(1):
            i = self.cursor
            old = float(x[i])
            if not self.pending_half_step:
                x[i] = max(old - sr[i], lower[i])
                f = allowance(x)
                if f < y:
                    y = f
                    self.improved_in_pass = True
                    if self._advance(dim):
                        sr = self.search_range.tolist()
                    continue
                x[i] = old
                if not allowance.available(1):
                    self.pending_half_step = True
                    break
            self.pending_half_step = False
            x[i] = min(old + 0.5 * sr[i], upper[i])
            f = allowance(x)
            if f < y:
                y = f
                self.improved_in_pass = True
            else:
                x[i] = old
            if self._advance(dim):
                sr = self.search_range.tolist()

        if y < solution.y_best:
            solution.x_best = x
            solution.y_best = y
        return solution

    def _advance(self, dim: int) -> bool:
        """Move the cursor; return True when a pass just ended."""
        self.cursor += 1
        if self.cursor >= dim:
            self.cursor = 0
            self._end_of_pass()
            return True
        return False

    def snapshot(self) -> dict:
        return {
            "search_range": None if self.search_range is None else self.search_range.copy(),
            "cursor": self.cursor,
            "improved_in_pass": self.improved_in_pass,
            "pending_half_step": self.pending_half_step,
            "rng": self.rng.bit_generator.state,
        }
