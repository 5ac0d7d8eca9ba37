"""Resource-metered blackbox optimization with a windowed softmax heuristic selector."""

from .benchmarks import SUITE, BenchmarkProblem, make_problem
from .bounds import empirical_exploration_rate, exploration_bounds, solve_hyperparameters
from .controller import (
    PolicyConfig,
    RandomPolicy,
    TERPolicy,
    WindowMemory,
    action_means,
    normalize_window,
    optimize,
    sample_action,
    ter_optimize,
)
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

__version__ = "0.1.0"
