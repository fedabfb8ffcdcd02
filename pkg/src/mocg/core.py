"""Shared types for multiobjective descent runs.

A problem bundles an objective map R^n -> R^m with its Jacobian and a
sampling box.  An ordering spec fixes the cone ordering the solver works
with through a finite generator set of the dual cone; the canonical
instance is the nonnegative orthant with the coordinate basis.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

EPS = float(np.finfo(np.float64).eps)
# Default relative step for finite-difference Jacobian checks.
FD_STEP = EPS ** (1.0 / 3.0)


class DimensionError(ValueError):
    """Raised when array shapes do not match the declared problem sizes."""


@dataclass
class Problem:
    """A continuously differentiable m-objective function on R^n.

    ``objectives(x)`` returns the m objective values as a 1-d array and
    ``jacobian(x)`` the m x n matrix whose rows are the objective
    gradients.  ``box`` holds one (low, high) sampling interval per
    coordinate; degenerate intervals (low == high) are permitted, inverted
    ones are not.  ``fd_step`` is the relative step used by the
    finite-difference check, overridable for badly scaled objectives.
    """

    name: str
    n: int
    m: int
    objectives: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    box: np.ndarray
    convex: bool = False
    fd_step: float = FD_STEP

    def __post_init__(self):
        if not self.name:
            raise ValueError("problem name must be nonempty")
        if self.n < 1 or self.m < 1:
            raise ValueError("problem sizes must be positive")
        self.box = np.asarray(self.box, dtype=float)
        if self.box.shape != (self.n, 2):
            raise DimensionError(
                f"box must have shape ({self.n}, 2), got {self.box.shape}"
            )
        if np.any(self.box[:, 0] > self.box[:, 1]):
            raise ValueError("box intervals must satisfy low <= high")


@dataclass
class OrderingSpec:
    """Finite generator description of a partial order on objective space.

    ``generators`` holds unit-norm rows spanning the dual cone; a vector d
    is a descent direction at x when max_v <J(x) d, v> over the rows is
    negative.  ``xi`` rescales the Armijo decrease requirement and must
    satisfy 0 < <xi, v> <= 1 for every generator row v.
    """

    generators: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        self.generators = np.atleast_2d(np.asarray(self.generators, dtype=float))
        self.xi = np.asarray(self.xi, dtype=float)
        if self.xi.shape != (self.generators.shape[1],):
            raise DimensionError("xi length must match generator dimension")
        norms = np.linalg.norm(self.generators, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("generator rows must have unit norm")
        pairing = self.generators @ self.xi
        if np.any(pairing <= 0.0) or np.any(pairing > 1.0 + 1e-12):
            raise ValueError("xi must satisfy 0 < <xi, v> <= 1 for all generators")

    @property
    def m(self) -> int:
        return self.generators.shape[1]

    @classmethod
    def canonical(cls, m: int) -> "OrderingSpec":
        """Componentwise order on R^m: coordinate basis generators, xi of ones."""
        return cls(generators=np.eye(m), xi=np.ones(m))


@dataclass
class EvalCounters:
    """Evaluation counts accumulated over one solver run."""

    n_obj_evals: int = 0
    n_jac_evals: int = 0
    n_subproblem_solves: int = 0

    def snapshot(self) -> tuple:
        return (self.n_obj_evals, self.n_jac_evals, self.n_subproblem_solves)


class CountingEvaluator:
    """Wraps a problem so that every evaluation increments shared counters.

    One call to ``objectives`` counts as one objective evaluation no
    matter how many objectives the problem has; same for ``jacobian``.
    """

    def __init__(self, problem: Problem, counters: EvalCounters):
        self.problem = problem
        self.counters = counters

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def m(self) -> int:
        return self.problem.m

    def objectives(self, x: np.ndarray) -> np.ndarray:
        self.counters.n_obj_evals += 1
        return self.problem.objectives(x)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        self.counters.n_jac_evals += 1
        return self.problem.jacobian(x)


@dataclass
class IterationRecord:
    """State recorded at one outer iteration.

    ``crit`` is the criticality measure Theta(x) (zero exactly at critical
    points, negative elsewhere), ``dd_steepest`` the worst-case directional
    derivative along the steepest direction and ``dd_direction`` the same
    quantity along the search direction actually formed.  ``step`` is the
    accepted step length leaving this iterate (NaN on the terminal
    record).  Counter fields snapshot the run counters at record time;
    vector fields may be dropped (None) when traces are slimmed for bulk
    experiments.
    """

    k: int
    x: Optional[np.ndarray]
    crit: float
    steepest: Optional[np.ndarray]
    beta: float
    direction: Optional[np.ndarray]
    step: float
    dd_direction: float
    dd_steepest: float
    qp_residual: float
    n_obj_evals: int
    n_jac_evals: int
    n_subproblem_solves: int


def sample_initial_point(problem: Problem, rng_seed: int) -> np.ndarray:
    """Draw one starting point uniformly from the problem box.

    Deterministic in ``rng_seed``; a degenerate interval yields its
    single endpoint.
    """
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(problem.box[:, 0], problem.box[:, 1])


def check_jacobian(
    problem: Problem,
    n_points: int = 20,
    rng_seed: int = 0,
    rel_tol: float = 1e-5,
    abs_floor: float = 1e-7,
):
    """Compare the analytic Jacobian against central differences.

    Samples ``n_points`` box points and checks every Jacobian row against
    a central-difference estimate of the corresponding objective, row
    deviation measured relative to the row's largest entry with an
    absolute floor near zero.  Returns ``(ok, worst_ratio, detail)`` where
    ``worst_ratio`` is the largest deviation over its allowance.
    """
    worst = 0.0
    detail = ""
    for i in range(n_points):
        x = sample_initial_point(problem, rng_seed + i)
        analytic = np.asarray(problem.jacobian(x), dtype=float)
        if analytic.shape != (problem.m, problem.n):
            return False, np.inf, f"jacobian shape {analytic.shape} at point {i}"
        fd = np.empty_like(analytic)
        for j in range(problem.n):
            h = problem.fd_step * max(1.0, abs(x[j]))
            e = np.zeros(problem.n)
            e[j] = h
            fd[:, j] = (
                np.asarray(problem.objectives(x + e), dtype=float)
                - np.asarray(problem.objectives(x - e), dtype=float)
            ) / (2.0 * h)
        for r in range(problem.m):
            allowed = max(rel_tol * np.max(np.abs(analytic[r])), abs_floor)
            err = float(np.max(np.abs(fd[r] - analytic[r])))
            ratio = err / allowed
            if ratio > worst:
                worst = ratio
                detail = f"row {r} at sample {i}: deviation {err:.3e}, allowed {allowed:.3e}"
    return worst <= 1.0, worst, detail
