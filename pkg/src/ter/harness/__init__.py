from .alignment import AlignmentScoring, similarity_matrix, smith_waterman
from .experiment import ExperimentConfig, ProblemSpec, load_results, run_experiment, run_single
from .report import build_report, write_report
from .stats import friedman_test, paired_t_test, tally

__all__ = [
    "AlignmentScoring",
    "ExperimentConfig",
    "ProblemSpec",
    "build_report",
    "friedman_test",
    "load_results",
    "paired_t_test",
    "run_experiment",
    "run_single",
    "similarity_matrix",
    "smith_waterman",
    "tally",
    "write_report",
]
