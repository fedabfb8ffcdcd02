"""Outer descent loop for the conjugate-gradient family.

One iteration: check the stop rule at the current iterate, form the
search direction for the chosen method, take a Wolfe-type step, and solve
the steepest-descent subproblem at the accepted point.  The three-term
method uses the generalized Wolfe search; the ablation variant and both
baselines use the strong one.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (
    CountingEvaluator,
    EvalCounters,
    IterationRecord,
    OrderingSpec,
    Problem,
)
from .directions import (
    CriticalPointError,
    DirectionState,
    prp_beta,
    prp_plus_direction,
    sd_direction,
    three_term_direction,
)
from .linesearch import (
    LineSearchError,
    LineSearchParams,
    NotDescentError,
    armijo_holds,
    curvature_holds,
    generalized_wolfe,
    strong_wolfe,
)
from .scalarize import (
    SubproblemError,
    max_dir_deriv,
    steepest_from_jacobian,
)

METHODS = ("tt-prp", "tt-prp1", "prp+", "sd")

STATUS_CONVERGED = "converged"
STATUS_ITERATION_CAP = "iteration_cap"
STATUS_LINESEARCH_FAILURE = "linesearch_failure"
STATUS_SUBPROBLEM_FAILURE = "subproblem_failure"

DEFAULT_STOP_TOL = 5.0 * float(np.sqrt(np.finfo(np.float64).eps))


@dataclass
class SolverConfig:
    method: str = "tt-prp"
    ls_params: LineSearchParams = field(default_factory=LineSearchParams)
    max_iters: int = 3000
    stop_tol: float = DEFAULT_STOP_TOL
    qp_tol: float = 1e-12

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.max_iters < 0 or self.stop_tol <= 0.0 or self.qp_tol <= 0.0:
            raise ValueError("max_iters must be >= 0 and tolerances positive")


@dataclass
class RunResult:
    status: str
    final_point: np.ndarray
    final_theta: float
    trace: list
    counters: EvalCounters
    wall_time: float


def uses_generalized_wolfe(method: str) -> bool:
    """Only the three-term method runs the two-sided curvature band."""
    return method == "tt-prp"


def solve(
    problem: Problem,
    x0,
    config: Optional[SolverConfig] = None,
    ordering: Optional[OrderingSpec] = None,
) -> RunResult:
    """Run one method from one starting point.

    Stops as converged when the criticality measure reaches
    ``-stop_tol``; otherwise ends at the iteration cap, on a failed line
    search (including a non-descent direction, which the two-term
    baseline can produce), or on a stalled subproblem.
    """
    if config is None:
        config = SolverConfig()
    if ordering is None:
        ordering = OrderingSpec.canonical(problem.m)
    counters = EvalCounters()
    ev = CountingEvaluator(problem, counters)
    started = time.perf_counter()
    trace: list = []

    def finish(status, x, theta):
        return RunResult(
            status=status,
            final_point=np.asarray(x, dtype=float),
            final_theta=theta,
            trace=trace,
            counters=counters,
            wall_time=time.perf_counter() - started,
        )

    x = np.asarray(x0, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"x0 must have shape ({problem.n},)")
    phi = np.asarray(ev.objectives(x), dtype=float)
    if not np.all(np.isfinite(phi)):
        return finish(STATUS_LINESEARCH_FAILURE, x, float("nan"))
    jac = np.asarray(ev.jacobian(x), dtype=float)
    if not np.all(np.isfinite(jac)):
        return finish(STATUS_LINESEARCH_FAILURE, x, float("nan"))

    def solve_subproblem(j):
        counters.n_subproblem_solves += 1
        return steepest_from_jacobian(j, ordering, config.qp_tol)

    try:
        res = solve_subproblem(jac)
    except SubproblemError:
        return finish(STATUS_SUBPROBLEM_FAILURE, x, float("nan"))

    state: Optional[DirectionState] = None
    k = 0
    while True:
        dd_steepest = max_dir_deriv(jac, res.direction, ordering)
        theta = res.theta

        def record(beta, direction, step, dd_direction):
            trace.append(
                IterationRecord(
                    k=k,
                    x=x.copy(),
                    crit=theta,
                    steepest=res.direction.copy(),
                    beta=beta,
                    direction=np.asarray(direction, dtype=float).copy(),
                    step=step,
                    dd_direction=dd_direction,
                    dd_steepest=dd_steepest,
                    qp_residual=res.kkt_residual,
                    n_obj_evals=counters.n_obj_evals,
                    n_jac_evals=counters.n_jac_evals,
                    n_subproblem_solves=counters.n_subproblem_solves,
                )
            )

        if theta >= -config.stop_tol:
            record(0.0, res.direction, float("nan"), dd_steepest)
            return finish(STATUS_CONVERGED, x, theta)
        if k >= config.max_iters:
            record(0.0, res.direction, float("nan"), dd_steepest)
            return finish(STATUS_ITERATION_CAP, x, theta)

        if state is None or config.method == "sd":
            beta = 0.0
            d = sd_direction(res.direction)
            dd_direction = dd_steepest
        else:
            try:
                beta = prp_beta(res.direction, dd_steepest, state, ordering)
            except CriticalPointError:
                record(0.0, res.direction, float("nan"), dd_steepest)
                return finish(STATUS_LINESEARCH_FAILURE, x, theta)
            if config.method == "prp+":
                d = prp_plus_direction(res.direction, beta, state)
            else:
                dd_prev_at_new = max_dir_deriv(jac, state.prev_direction, ordering)
                d = three_term_direction(
                    res.direction, dd_steepest, dd_prev_at_new, beta, state
                )
            dd_direction = max_dir_deriv(jac, d, ordering)

        search = generalized_wolfe if uses_generalized_wolfe(config.method) else strong_wolfe
        try:
            outcome = search(
                ev, x, d, dd_direction, ordering, config.ls_params, phi0=phi
            )
        except (LineSearchError, NotDescentError):
            record(beta, d, float("nan"), dd_direction)
            return finish(STATUS_LINESEARCH_FAILURE, x, theta)
        if not (
            np.all(np.isfinite(outcome.obj_at_step))
            and np.all(np.isfinite(outcome.jac_at_step))
        ):
            record(beta, d, float("nan"), dd_direction)
            return finish(STATUS_LINESEARCH_FAILURE, x, theta)

        record(beta, d, outcome.alpha, dd_direction)
        state = DirectionState(
            prev_direction=d,
            prev_lambda_steepest=dd_steepest,
            prev_point=x,
            prev_jacobian=jac,
        )
        x = outcome.x_at_step
        phi = outcome.obj_at_step
        jac = outcome.jac_at_step
        try:
            res = solve_subproblem(jac)
        except SubproblemError:
            return finish(STATUS_SUBPROBLEM_FAILURE, x, float("nan"))
        k += 1


def verify_run(
    run: RunResult,
    problem: Problem,
    config: SolverConfig,
    ordering: Optional[OrderingSpec] = None,
    slack: float = 1e-9,
) -> list:
    """Recheck a finished trace from scratch; returns violation messages.

    Re-evaluates objectives and Jacobians at the recorded points and
    verifies sufficient descent against a freshly solved subproblem, the
    Armijo decrease and both curvature bounds for every accepted step.
    The descent slack is scaled by the magnitude of the compared
    derivatives, since a fixed absolute slack would fall below one
    rounding ulp on badly scaled problems.
    """
    if ordering is None:
        ordering = OrderingSpec.canonical(problem.m)
    params = config.ls_params
    mu = params.mu if uses_generalized_wolfe(config.method) else params.sigma
    violations = []
    trace = run.trace
    # successive records share a point (one's successor is the next one's
    # base), so carry those evaluations forward instead of repeating them
    carried_phi = carried_jac = None
    carried_for = -1
    for i, rec in enumerate(trace):
        if rec.x is None or rec.direction is None:
            violations.append(f"iteration {rec.k}: trace was slimmed, cannot recheck")
            break
        if carried_for == i:
            phi_here, jac = carried_phi, carried_jac
        else:
            phi_here = None
            jac = np.asarray(problem.jacobian(rec.x), dtype=float)
        fresh = steepest_from_jacobian(jac, ordering, config.qp_tol)
        dd_st = max_dir_deriv(jac, fresh.direction, ordering)
        dd_dir = max_dir_deriv(jac, rec.direction, ordering)
        tol = slack * max(1.0, abs(dd_st))
        if dd_dir > dd_st + tol:
            violations.append(
                f"iteration {rec.k}: sufficient descent fails "
                f"({dd_dir!r} > {dd_st!r} + {tol:.1e})"
            )
        if not np.isfinite(rec.step):
            continue
        if i + 1 >= len(trace) or trace[i + 1].x is None:
            violations.append(f"iteration {rec.k}: accepted step has no successor")
            continue
        if phi_here is None:
            phi_here = np.asarray(problem.objectives(rec.x), dtype=float)
        x_next = trace[i + 1].x
        phi_next = np.asarray(problem.objectives(x_next), dtype=float)
        jac_next = np.asarray(problem.jacobian(x_next), dtype=float)
        dd_next = max_dir_deriv(jac_next, rec.direction, ordering)
        carried_phi, carried_jac, carried_for = phi_next, jac_next, i + 1
        if not armijo_holds(
            phi_next, phi_here, rec.step, dd_dir, ordering, params.rho
        ):
            violations.append(f"iteration {rec.k}: Armijo decrease fails")
        lower, upper = curvature_holds(dd_next, dd_dir, params.sigma, mu)
        if not lower:
            violations.append(f"iteration {rec.k}: lower curvature bound fails")
        if not upper:
            violations.append(f"iteration {rec.k}: upper curvature bound fails")
    return violations


def slim_record(rec: IterationRecord) -> IterationRecord:
    """Drop the vector fields of a record, keeping every scalar diagnostic."""
    return replace(rec, x=None, steepest=None, direction=None)
