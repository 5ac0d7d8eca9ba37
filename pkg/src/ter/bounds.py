"""Closed-form behaviour bounds of the softmax controller and their inversion.

``exploration_bounds`` evaluates the two expressions exactly as they are
commonly stated for this controller. The first of them is really the ceiling
on *exploitation* (best action at normalized mean 1, all others at 0), so its
complement is the floor on exploration. It is returned separately as
``complement_lower``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .controller import (
    INFINITE,
    PolicyConfig,
    action_means,
    normalize_window,
    sample_action,
)
from .core import ContractViolation, EfficiencyRecord


@dataclass(frozen=True)
class ExplorationBounds:
    lower: float
    upper: float
    complement_lower: float

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "complement_lower": self.complement_lower}


def exploitation_ceiling(action_count: int, tau: float) -> float:
    """e^(1/tau) / (|A| - 1 + e^(1/tau)), computed without overflow."""
    others = action_count - 1
    # divide through by e^(1/tau)
    return 1.0 / (1.0 + others * math.exp(-1.0 / tau))


def _window_exponent(action_count: int, window: int, tau: float) -> float:
    return (window - action_count) / (tau * (window - action_count + 1))


def exploration_bounds(action_count: int, window: int, tau: float) -> ExplorationBounds:
    if action_count < 2:
        raise ContractViolation("bounds need at least two actions")
    if window < action_count:
        raise ContractViolation(
            f"window ({window}) must hold at least one record per action ({action_count})"
        )
    if not tau > 0:
        raise ContractViolation(f"tau must be positive, got {tau}")
    others = action_count - 1
    lower = exploitation_ceiling(action_count, tau)
    # (|A|-1) / ((|A|-1) e^(1/tau) + e^(c/tau)), scaled by e^(-1/tau)
    c = _window_exponent(action_count, window, tau)
    upper = others * math.exp(-1.0 / tau) / (others + math.exp(c - 1.0 / tau))
    scaled = others * math.exp(-1.0 / tau)
    complement_lower = scaled / (1.0 + scaled)
    return ExplorationBounds(lower, upper, complement_lower)


def exploitation_floor(action_count: int, window: int, tau: float) -> float:
    """Exploitation lower bound obtained by subtracting the window-dependent term from 1."""
    return 1.0 - exploration_bounds(action_count, window, tau).upper


def solve_hyperparameters(
    p_exploit_min: float,
    p_exploit_max: float,
    action_count: int,
    max_window: int = 10_000,
) -> list[tuple[float, int]]:
    """Invert the bounds into ``(tau, window)`` pairs with ``tau = 1/k``.

    ``k`` is the largest integer whose exploitation ceiling does not exceed
    ``p_exploit_max``; the window is the smallest ``w >= |A| + 1`` whose
    exploitation floor reaches ``p_exploit_min``. Returns ``[]`` when the
    interval is empty or no pair satisfies both constraints.
    """
    if p_exploit_min >= p_exploit_max or action_count < 2:
        return []
    if not (0 < p_exploit_min and p_exploit_max < 1):
        raise ContractViolation("exploitation probabilities must lie in (0, 1)")
    others = action_count - 1
    k_star = math.log(others * p_exploit_max / (1.0 - p_exploit_max))
    k = math.floor(k_star + 1e-12)
    if k < 1:
        return []
    tau = 1.0 / k
    if exploitation_ceiling(action_count, tau) < p_exploit_min:
        return []
    for window in range(action_count + 1, max_window + 1):
        if exploitation_floor(action_count, window, tau) >= p_exploit_min:
            return [(tau, window)]
    return []


def exploration_probability(means: Sequence[float], tau: float) -> float:
    """Exact probability of not picking the (first) argmax action."""
    if any(m == INFINITE for m in means):
        raise ContractViolation("every action needs a record")
    best = int(np.argmax(means))
    top = max(means)
    weights = [math.exp((m - top) / tau) for m in means]
    return 1.0 - weights[best] / sum(weights)


def empirical_exploration_rate(
    config: PolicyConfig,
    window_contents: Sequence[EfficiencyRecord],
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo frequency of choosing a non-argmax action from a fixed window."""
    means = action_means(normalize_window(window_contents), config.action_count)
    if any(m == INFINITE for m in means):
        raise ContractViolation("every action needs at least one record in the window")
    best = int(np.argmax(means))
    misses = 0
    for _ in range(trials):
        if sample_action(means, config.tau, rng) != best:
            misses += 1
    return misses / trials
