"""Comparison report assembled purely from persisted run records."""
from __future__ import annotations

import csv
import json
from itertools import combinations
from pathlib import Path

import numpy as np

from .alignment import DEFAULT_SCORING, AlignmentScoring, similarity_matrix
from .stats import friedman_test, paired_t_test, tally


def _ordered(values):
    return list(dict.fromkeys(values))


def _policy_sort_key(policy: str):
    order = {"ter": 0, "random": 1}
    return (order.get(policy, 2), policy)


def build_report(results, scoring: AlignmentScoring = DEFAULT_SCORING, alpha: float = 0.05) -> dict:
    """``results`` maps ``(problem_key, policy)`` to the list of that cell's runs."""
    problems = _ordered(k for k, _ in results)
    policies = sorted(_ordered(p for _, p in results), key=_policy_sort_key)

    summary: dict[str, dict] = {}
    for problem in problems:
        summary[problem] = {}
        for policy in policies:
            recs = results.get((problem, policy))
            if not recs:
                continue
            err = np.array([r.y_final for r in recs])
            summary[problem][policy] = {
                "mean": float(err.mean()),
                "std": float(err.std()),
                "runs": len(recs),
                "mean_decisions": float(np.mean([len(r.action_sequence) for r in recs])),
            }

    t_tests = {}
    for first, second in combinations(policies, 2):
        cases, outcomes = {}, []
        for problem in problems:
            a, b = results.get((problem, first)), results.get((problem, second))
            if not a or not b or len(a) != len(b) or len(a) < 2:
                continue
            res = paired_t_test([r.y_final for r in a], [r.y_final for r in b], alpha)
            outcomes.append(res)
            cases[problem] = {"decision": res.decision, "t": res.t, "p_value": res.p_value}
        if outcomes:
            t_tests[f"{first} vs {second}"] = {"string": tally(outcomes), "cases": cases}

    friedman = None
    complete = [p for p in problems if all(pol in summary[p] for pol in policies)]
    if len(policies) >= 2 and len(complete) >= 2:
        matrix = np.array([[summary[p][pol]["mean"] for p in complete] for pol in policies])
        fr = friedman_test(matrix)
        friedman = {
            "statistic": fr.statistic,
            "p_value": fr.p_value,
            "significant": fr.p_value < alpha,
            "problems": complete,
            "mean_ranks": {pol: float(r) for pol, r in zip(policies, fr.mean_ranks)},
        }

    best_single = {}
    for problem in problems:
        singles = {p: v["mean"] for p, v in summary[problem].items() if p.startswith("single:")}
        if singles:
            best_single[problem] = min(singles, key=singles.get)

    similarity = {}
    for problem in problems:
        groups = [p for p in policies if (problem, p) in results]
        seqs = [[r.action_sequence for r in results[(problem, p)]] for p in groups]
        similarity[problem] = {
            "groups": groups,
            "raw": similarity_matrix(seqs, scoring).tolist(),
            "normalized": similarity_matrix(seqs, scoring, normalized=True).tolist(),
        }

    # same function and policy across dimensions
    by_dimension = {}
    for policy in policies:
        functions = _ordered(k.rsplit("_D", 1)[0] for k in problems)
        for function in functions:
            keys = [k for k in problems if k.rsplit("_D", 1)[0] == function and (k, policy) in results]
            if len(keys) < 2:
                continue
            keys.sort(key=lambda k: int(k.rsplit("_D", 1)[1]))
            seqs = [[r.action_sequence for r in results[(k, policy)]] for k in keys]
            by_dimension[f"{function} | {policy}"] = {
                "groups": keys,
                "raw": similarity_matrix(seqs, scoring).tolist(),
                "normalized": similarity_matrix(seqs, scoring, normalized=True).tolist(),
            }

    return {
        "problems": problems,
        "policies": policies,
        "alpha": alpha,
        "scoring": {"match": scoring.match, "mismatch": scoring.mismatch, "gap": scoring.gap},
        "summary": summary,
        "t_tests": t_tests,
        "friedman": friedman,
        "best_single": best_single,
        "similarity": similarity,
        "similarity_by_dimension": by_dimension,
    }


def write_report(report: dict, results, out_dir: str | Path) -> Path:
    """Write ``report.json``, CSV tables and per-run curve CSVs under ``out_dir/report``."""
    target = Path(out_dir) / "report"
    target.mkdir(parents=True, exist_ok=True)
    (target / "report.json").write_text(json.dumps(report, indent=1))

    with open(target / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["problem", "policy", "mean", "std", "runs", "mean_decisions"])
        for problem, cells in report["summary"].items():
            for policy, v in cells.items():
                w.writerow([problem, policy, repr(v["mean"]), repr(v["std"]), v["runs"], v["mean_decisions"]])

    with open(target / "t_tests.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["pair", "problem", "decision", "t", "p_value"])
        for pair, body in report["t_tests"].items():
            for problem, case in body["cases"].items():
                w.writerow([pair, problem, case["decision"], case["t"], case["p_value"]])
            w.writerow([pair, "ALL", body["string"], "", ""])

    if report["friedman"]:
        with open(target / "friedman.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["policy", "mean_rank"])
            for policy, rank in report["friedman"]["mean_ranks"].items():
                w.writerow([policy, rank])
            w.writerow(["statistic", report["friedman"]["statistic"]])
            w.writerow(["p_value", report["friedman"]["p_value"]])

    curves = target / "curves"
    for (key, policy), records in results.items():
        for i, record in enumerate(records):
            d = curves / key / policy.replace(":", "-")
            d.mkdir(parents=True, exist_ok=True)
            record.save_curve_csv(d / f"run_{i:03d}.csv")
    return target


def format_summary(report: dict) -> str:
    lines = [f"{'problem':<20} {'policy':<14} {'mean':>12} {'std':>12}"]
    for problem, cells in report["summary"].items():
        for policy, v in cells.items():
            lines.append(f"{problem:<20} {policy:<14} {v['mean']:>12.4e} {v['std']:>12.4e}")
    for pair, body in report["t_tests"].items():
        lines.append(f"t-test {pair}: {body['string']}  (</~/>)")
    if report["friedman"]:
        fr = report["friedman"]
        ranks = ", ".join(f"{p}={r:.2f}" for p, r in fr["mean_ranks"].items())
        lines.append(f"Friedman chi2={fr['statistic']:.4f} p={fr['p_value']:.4g}  ranks: {ranks}")
    return "\n".join(lines)
