"""Paired t-test and Friedman test, as used for benchmark tables.

p-values come from the regularized incomplete beta (Student t) and the
regularized upper incomplete gamma (chi-square).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc, gammaincc
from scipy.stats import rankdata

from ..core import ContractViolation

FIRST_SMALLER = "first_smaller"
INDISTINCT = "indistinct"
FIRST_GREATER = "first_greater"


@dataclass(frozen=True)
class TTestResult:
    decision: str
    t: float
    p_value: float


def student_t_two_sided_p(t: float, df: int) -> float:
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def chi2_sf(x: float, df: int) -> float:
    return float(gammaincc(df / 2.0, x / 2.0))


def paired_t_test(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TTestResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractViolation("paired samples must be 1-D and of equal length")
    n = a.size
    if n < 2:
        raise ContractViolation("paired t-test needs at least two pairs")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(INDISTINCT, 0.0, 1.0)
        # zero variance, nonzero shift: the t = +-inf limit
        return TTestResult(FIRST_SMALLER if mean < 0 else FIRST_GREATER, math.copysign(math.inf, mean), 0.0)
    t = mean / (sd / math.sqrt(n))
    p = student_t_two_sided_p(t, n - 1)
    if p < alpha:
        return TTestResult(FIRST_SMALLER if t < 0 else FIRST_GREATER, t, p)
    return TTestResult(INDISTINCT, t, p)


def tally(results: Sequence[TTestResult]) -> str:
    """Collapse per-case decisions into a ``"<n>/<n>/<n>"`` string (smaller/indistinct/greater)."""
    smaller = sum(r.decision == FIRST_SMALLER for r in results)
    same = sum(r.decision == INDISTINCT for r in results)
    greater = sum(r.decision == FIRST_GREATER for r in results)
    return f"{smaller}/{same}/{greater}"


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    mean_ranks: np.ndarray


def friedman_test(results: np.ndarray) -> FriedmanResult:
    """Friedman test on an algorithms x problems matrix (lower is better)."""
    results = np.asarray(results, dtype=float)
    if results.ndim != 2 or results.shape[0] < 2 or results.shape[1] < 2:
        raise ContractViolation("need at least 2 algorithms and 2 problems")
    k, n = results.shape
    ranks = np.apply_along_axis(rankdata, 0, results)
    mean_ranks = ranks.mean(axis=1)
    stat = 12.0 * n / (k * (k + 1)) * (np.sum(mean_ranks**2) - k * (k + 1) ** 2 / 4.0)
    stat = max(float(stat), 0.0)
    return FriedmanResult(stat, chi2_sf(stat, k - 1), mean_ranks)
