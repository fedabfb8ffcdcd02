"""Outer loop behavior: statuses, trace invariants, from-scratch recheck."""

import numpy as np
import pytest

from mocg import (
    DEFAULT_STOP_TOL,
    METHODS,
    OrderingSpec,
    Problem,
    RunResult,
    STATUS_CONVERGED,
    STATUS_ITERATION_CAP,
    STATUS_LINESEARCH_FAILURE,
    SolverConfig,
    get_problem,
    sample_initial_point,
    solve,
    verify_run,
)
from mocg.solver import slim_record, uses_generalized_wolfe

CANON2 = OrderingSpec.canonical(2)
EX1_START = np.array([1.5, 0.9])


def _single_quadratic():
    return Problem(
        name="quad2",
        n=2,
        m=1,
        objectives=lambda x: np.array([0.5 * float(x @ x)]),
        jacobian=lambda x: x.reshape(1, 2),
        box=np.array([[-3.0, 3.0], [-3.0, 3.0]]),
    )


class TestConfig:
    def test_method_normalized(self):
        assert SolverConfig(method="TT-PRP").method == "tt-prp"

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(method="bfgs")

    def test_bad_tolerances_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(stop_tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(max_iters=-1)

    def test_line_search_assignment(self):
        assert uses_generalized_wolfe("tt-prp")
        for method in ("tt-prp1", "prp+", "sd"):
            assert not uses_generalized_wolfe(method)


class TestSolveBasics:
    @pytest.mark.parametrize("method", METHODS)
    def test_ex1_converges_from_reference_start(self, method):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig(method=method))
        assert run.status == STATUS_CONVERGED
        assert run.final_theta >= -DEFAULT_STOP_TOL
        assert run.trace[0].k == 0
        assert [rec.k for rec in run.trace] == list(range(len(run.trace)))

    def test_single_objective_reaches_minimum(self):
        run = solve(_single_quadratic(), np.array([2.0, -1.0]), SolverConfig(method="sd"))
        assert run.status == STATUS_CONVERGED
        np.testing.assert_allclose(run.final_point, np.zeros(2), atol=1e-3)

    def test_wrong_x0_shape_raises(self):
        with pytest.raises(ValueError):
            solve(get_problem("EX1"), np.zeros(3), SolverConfig())

    def test_iteration_cap_status(self):
        run = solve(
            get_problem("EX1"), EX1_START, SolverConfig(method="sd", max_iters=0)
        )
        assert run.status == STATUS_ITERATION_CAP
        assert len(run.trace) == 1
        assert np.isnan(run.trace[-1].step)

    def test_nonfinite_objective_fails_cleanly(self):
        p = Problem(
            name="bad",
            n=1,
            m=1,
            objectives=lambda x: np.array([np.nan]),
            jacobian=lambda x: np.array([[1.0]]),
            box=np.array([[-1.0, 1.0]]),
        )
        run = solve(p, np.zeros(1), SolverConfig())
        assert run.status == STATUS_LINESEARCH_FAILURE
        assert np.isnan(run.final_theta)

    def test_already_critical_start(self):
        # the quadratic's minimum is critical; one record, no steps
        run = solve(_single_quadratic(), np.zeros(2), SolverConfig())
        assert run.status == STATUS_CONVERGED
        assert len(run.trace) == 1


class TestTraceInvariants:
    @pytest.mark.parametrize("method", METHODS)
    def test_recorded_steps_chain_exactly(self, method):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig(method=method))
        for prev, nxt in zip(run.trace, run.trace[1:]):
            np.testing.assert_array_equal(
                nxt.x, prev.x + prev.step * prev.direction
            )

    def test_terminal_record_has_nan_step(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        assert np.isnan(run.trace[-1].step)
        assert all(np.isfinite(rec.step) for rec in run.trace[:-1])

    def test_counters_monotone_and_recorded(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        evals = [(r.n_obj_evals, r.n_jac_evals, r.n_subproblem_solves) for r in run.trace]
        assert evals == sorted(evals)
        assert run.counters.snapshot() == evals[-1]

    def test_criticality_column_is_the_subproblem_value(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        assert all(rec.crit <= 0.0 for rec in run.trace)
        assert run.trace[-1].crit == run.final_theta

    def test_qp_residual_recorded_small(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        assert all(rec.qp_residual <= 1e-7 for rec in run.trace)

    def test_deterministic_given_start(self):
        a = solve(get_problem("EX1"), EX1_START, SolverConfig())
        b = solve(get_problem("EX1"), EX1_START, SolverConfig())
        assert len(a.trace) == len(b.trace)
        for ra, rb in zip(a.trace, b.trace):
            np.testing.assert_array_equal(ra.x, rb.x)
            assert ra.crit == rb.crit and ra.beta == rb.beta

    def test_beta_zero_on_first_iteration_and_sd(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig(method="sd"))
        assert all(rec.beta == 0.0 for rec in run.trace)
        run = solve(get_problem("EX1"), EX1_START, SolverConfig(method="tt-prp"))
        assert run.trace[0].beta == 0.0


class TestVerifyRun:
    @pytest.mark.parametrize("method", ["tt-prp", "tt-prp1", "sd"])
    def test_clean_runs_have_no_violations(self, method):
        p = get_problem("EX1")
        cfg = SolverConfig(method=method)
        for seed in range(10):
            run = solve(p, sample_initial_point(p, seed), cfg)
            assert verify_run(run, p, cfg) == []

    def test_corrupted_direction_is_flagged(self):
        p = get_problem("EX1")
        cfg = SolverConfig()
        run = solve(p, EX1_START, cfg)
        run.trace[0].direction = -run.trace[0].direction
        msgs = verify_run(run, p, cfg)
        assert any("sufficient descent fails" in m for m in msgs)

    def test_corrupted_step_is_flagged(self):
        p = get_problem("EX1")
        cfg = SolverConfig()
        run = solve(p, EX1_START, cfg)
        run.trace[0].step = run.trace[0].step * 1e6
        msgs = verify_run(run, p, cfg)
        assert any("Armijo" in m for m in msgs)

    def test_corrupted_successor_point_is_flagged(self):
        p = get_problem("EX1")
        cfg = SolverConfig()
        run = solve(p, EX1_START, cfg)
        run.trace[1].x = run.trace[1].x + 0.4
        msgs = verify_run(run, p, cfg)
        assert any("Armijo" in m or "curvature" in m for m in msgs)

    def test_slimmed_trace_reported_not_crashed(self):
        p = get_problem("EX1")
        cfg = SolverConfig()
        run = solve(p, EX1_START, cfg)
        run.trace = [slim_record(r) for r in run.trace]
        msgs = verify_run(run, p, cfg)
        assert msgs and "slimmed" in msgs[0]


class TestSlimRecord:
    def test_drops_vectors_keeps_scalars(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        rec = run.trace[0]
        slim = slim_record(rec)
        assert slim.x is None and slim.steepest is None and slim.direction is None
        assert slim.crit == rec.crit
        assert slim.n_jac_evals == rec.n_jac_evals
        # the original record is untouched
        assert rec.x is not None


class TestRunResultShape:
    def test_fields(self):
        run = solve(get_problem("EX1"), EX1_START, SolverConfig())
        assert isinstance(run, RunResult)
        assert run.wall_time >= 0.0
        assert run.final_point.shape == (2,)
