"""Conjugate-gradient methods for unconstrained multiobjective optimization.

Steepest descent, a nonnegative Polak-Ribiere-Polyak update, and a
corrected three-term variant whose search directions keep sufficient
descent unconditionally, together with generalized Wolfe line searches,
a benchmark problem roster, and a deterministic multi-start experiment
harness with performance-profile and Pareto-front export.
"""

__version__ = "0.1.0"

from .core import (
    CountingEvaluator,
    DimensionError,
    EvalCounters,
    IterationRecord,
    OrderingSpec,
    Problem,
    check_jacobian,
    sample_initial_point,
)
from .scalarize import (
    SteepestResult,
    SubproblemError,
    criticality,
    max_dir_deriv,
    project_simplex,
    steepest_direction,
    steepest_from_jacobian,
)
from .linesearch import (
    LineSearchError,
    LineSearchOutcome,
    LineSearchParams,
    NoRootError,
    NotDescentError,
    exact_line_search,
    generalized_wolfe,
    strong_wolfe,
)
from .directions import (
    CriticalPointError,
    DirectionState,
    prp_beta,
    prp_plus_direction,
    sd_direction,
    three_term_direction,
)
from .solver import (
    DEFAULT_STOP_TOL,
    METHODS,
    STATUS_CONVERGED,
    STATUS_ITERATION_CAP,
    STATUS_LINESEARCH_FAILURE,
    STATUS_SUBPROBLEM_FAILURE,
    RunResult,
    SolverConfig,
    solve,
    verify_run,
)
from .problems import UnknownProblemError, get_problem, list_problems, problem_names
from .bench import (
    BenchRun,
    ExperimentSpec,
    MetricsRow,
    ProfileCurve,
    aggregate_metrics,
    export_pareto_points,
    mutual_nondominance_fraction,
    performance_profile,
    run_experiment,
    strictly_dominates,
)
from .checks import brute_force_steepest, compare_with_oracle, run_battery

__all__ = [
    "__version__",
    "BenchRun",
    "CountingEvaluator",
    "CriticalPointError",
    "DEFAULT_STOP_TOL",
    "DimensionError",
    "DirectionState",
    "EvalCounters",
    "ExperimentSpec",
    "IterationRecord",
    "LineSearchError",
    "LineSearchOutcome",
    "LineSearchParams",
    "METHODS",
    "MetricsRow",
    "NoRootError",
    "NotDescentError",
    "OrderingSpec",
    "Problem",
    "ProfileCurve",
    "RunResult",
    "STATUS_CONVERGED",
    "STATUS_ITERATION_CAP",
    "STATUS_LINESEARCH_FAILURE",
    "STATUS_SUBPROBLEM_FAILURE",
    "SolverConfig",
    "SteepestResult",
    "SubproblemError",
    "UnknownProblemError",
    "aggregate_metrics",
    "brute_force_steepest",
    "check_jacobian",
    "compare_with_oracle",
    "criticality",
    "exact_line_search",
    "export_pareto_points",
    "generalized_wolfe",
    "get_problem",
    "list_problems",
    "max_dir_deriv",
    "mutual_nondominance_fraction",
    "performance_profile",
    "problem_names",
    "project_simplex",
    "prp_beta",
    "prp_plus_direction",
    "run_battery",
    "run_experiment",
    "sample_initial_point",
    "sd_direction",
    "solve",
    "steepest_direction",
    "steepest_from_jacobian",
    "strictly_dominates",
    "strong_wolfe",
    "three_term_direction",
    "verify_run",
]
