"""Local alignment of decision sequences."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from ..core import ContractViolation


@dataclass(frozen=True)
class AlignmentScoring:
    match: float = 2.0
    mismatch: float = -1.0
    gap: float = -1.0

    def __post_init__(self):
        if not self.match > 0:
            raise ContractViolation("match score must be positive")
        if self.mismatch > 0 or self.gap > 0:
            raise ContractViolation("mismatch and gap scores must be <= 0")


DEFAULT_SCORING = AlignmentScoring()


def smith_waterman(
    seq_a: Sequence[int], seq_b: Sequence[int], scoring: AlignmentScoring = DEFAULT_SCORING
) -> float:
    """Best local alignment score with a linear gap penalty.

    Rows are filled with numpy: the in-row gap recurrence
    ``H[j] = max(c[j], H[j-1] + gap)`` unrolls to a running maximum of
    ``c[k] - gap * k`` shifted back by ``gap * j``.
    """
    a = np.asarray(seq_a)
    b = np.asarray(seq_b)
    if a.size == 0 or b.size == 0:
        return 0.0
    gap = float(scoring.gap)
    steps = gap * np.arange(1, b.size + 1)
    prev = np.zeros(b.size + 1)
    best = 0.0
    for ai in a:
        sub = np.where(b == ai, scoring.match, scoring.mismatch)
        cand = np.maximum(prev[:-1] + sub, prev[1:] + gap)
        np.maximum(cand, 0.0, out=cand)
        row = np.maximum.accumulate(cand - steps) + steps
        best = max(best, float(row.max()))
        prev[1:] = row
    return best


def normalized_score(seq_a, seq_b, scoring: AlignmentScoring = DEFAULT_SCORING) -> float:
    """Score divided by the best achievable one, ``match * min(len)``."""
    shortest = min(len(seq_a), len(seq_b))
    if shortest == 0:
        return 0.0
    return smith_waterman(seq_a, seq_b, scoring) / (scoring.match * shortest)


def similarity_matrix(
    groups: Sequence[Sequence[Sequence[int]]],
    scoring: AlignmentScoring = DEFAULT_SCORING,
    normalized: bool = False,
) -> np.ndarray:
    """Mean alignment score over all cross pairs of sequences from two groups.

    Diagonal entries pair every sequence of a group with every sequence of
    the same group, itself included.
    """
    score = normalized_score if normalized else smith_waterman
    k = len(groups)
    for g in groups:
        if len(g) == 0:
            raise ContractViolation("every group needs at least one sequence")
    out = np.zeros((k, k))
    for gi in range(k):
        for hi in range(gi, k):
            vals = [score(s, t, scoring) for s, t in product(groups[gi], groups[hi])]
            out[gi, hi] = out[hi, gi] = float(np.mean(vals))
    return out
