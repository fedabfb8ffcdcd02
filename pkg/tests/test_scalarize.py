"""Scalarization and steepest-descent subproblem tests.

The closed-form cases are hand-derived: single objective (direction is
minus the gradient), two opposite gradients (critical, zero direction)
and two orthogonal gradients (equal-weight average).  Random instances
are checked against the independent grid-refinement oracle.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mocg import (
    DimensionError,
    OrderingSpec,
    SubproblemError,
    criticality,
    max_dir_deriv,
    project_simplex,
    steepest_direction,
    steepest_from_jacobian,
)
from mocg.checks import (
    brute_force_steepest,
    compare_with_oracle,
    random_small_jacobian,
)

CANON2 = OrderingSpec.canonical(2)


def _finite_vectors(n):
    return st.lists(
        st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False),
        min_size=n,
        max_size=n,
    ).map(np.array)


class TestMaxDirDeriv:
    def test_single_objective_is_inner_product(self):
        jac = np.array([[3.0, -1.0]])
        d = np.array([0.5, 2.0])
        spec = OrderingSpec.canonical(1)
        assert max_dir_deriv(jac, d, spec) == pytest.approx(jac[0] @ d)

    def test_picks_worst_row(self):
        jac = np.array([[1.0, 0.0], [0.0, -1.0]])
        d = np.array([1.0, 1.0])
        # rows give +1 and -1, the max is +1
        assert max_dir_deriv(jac, d, CANON2) == 1.0

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionError):
            max_dir_deriv(np.eye(3), np.ones(3), CANON2)
        with pytest.raises(DimensionError):
            max_dir_deriv(np.eye(2), np.ones(3), CANON2)

    @given(_finite_vectors(3), _finite_vectors(3), st.floats(0.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_positively_homogeneous(self, row, d, t):
        jac = np.vstack((row, -0.5 * row, row + 1.0))
        spec = OrderingSpec.canonical(3)
        lhs = max_dir_deriv(jac, t * d, spec)
        rhs = t * max_dir_deriv(jac, d, spec)
        assert lhs == pytest.approx(rhs, abs=1e-9 * (1.0 + abs(rhs)))

    @given(_finite_vectors(2), _finite_vectors(2), _finite_vectors(2))
    @settings(max_examples=200, deadline=None)
    def test_subadditive(self, row, u, v):
        jac = np.vstack((row, np.roll(row, 1)))
        lhs = max_dir_deriv(jac, u + v, CANON2)
        rhs = max_dir_deriv(jac, u, CANON2) + max_dir_deriv(jac, v, CANON2)
        assert lhs <= rhs + 1e-9 * (1.0 + abs(rhs))


class TestProjectSimplex:
    def test_interior_point_fixed(self):
        w = np.array([0.2, 0.3, 0.5])
        np.testing.assert_allclose(project_simplex(w), w)

    def test_large_coordinate_wins(self):
        np.testing.assert_allclose(
            project_simplex(np.array([10.0, 0.0])), [1.0, 0.0]
        )

    def test_uniform_shift_invariant(self):
        v = np.array([0.4, -1.2, 3.1])
        np.testing.assert_allclose(
            project_simplex(v), project_simplex(v + 7.5), atol=1e-12
        )

    @given(_finite_vectors(4))
    @settings(max_examples=200, deadline=None)
    def test_lands_on_simplex_and_is_nearest(self, v):
        p = project_simplex(v)
        assert np.all(p >= 0.0)
        assert np.sum(p) == pytest.approx(1.0, abs=1e-9)
        # optimality: no feasible point is closer (check simplex vertices)
        for j in range(4):
            e = np.zeros(4)
            e[j] = 1.0
            assert np.sum((p - v) ** 2) <= np.sum((e - v) ** 2) + 1e-9


class TestSteepestClosedForm:
    def test_single_objective(self):
        jac = np.array([[2.0, -4.0]])
        res = steepest_from_jacobian(jac, OrderingSpec.canonical(1))
        np.testing.assert_allclose(res.direction, -jac[0], atol=1e-10)
        assert res.theta == pytest.approx(-0.5 * float(jac[0] @ jac[0]))

    def test_opposite_gradients_are_critical(self):
        jac = np.array([[1.0, 2.0], [-1.0, -2.0]])
        res = steepest_from_jacobian(jac, CANON2)
        np.testing.assert_allclose(res.direction, np.zeros(2), atol=1e-6)
        assert res.theta == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_gradients_average(self):
        jac = np.array([[2.0, 0.0], [0.0, 2.0]])
        res = steepest_from_jacobian(jac, CANON2)
        np.testing.assert_allclose(res.direction, [-1.0, -1.0], atol=1e-9)
        np.testing.assert_allclose(res.dual_weights, [0.5, 0.5], atol=1e-9)
        # dd = -2, plus ||d||^2 / 2 = 1
        assert res.theta == pytest.approx(-1.0, abs=1e-9)

    def test_dominated_row_gets_zero_weight(self):
        # second gradient is strictly shorter along the same ray, so the
        # minimum-norm hull point is that gradient alone
        jac = np.array([[4.0, 0.0], [1.0, 0.0]])
        res = steepest_from_jacobian(jac, CANON2)
        np.testing.assert_allclose(res.direction, [-1.0, 0.0], atol=1e-8)
        assert res.dual_weights[1] == pytest.approx(1.0, abs=1e-6)

    def test_theta_never_positive(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            jac = random_small_jacobian(rng)
            res = steepest_from_jacobian(jac, OrderingSpec.canonical(jac.shape[0]))
            assert res.theta <= 0.0

    def test_weights_on_simplex_and_residual_small(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            jac = random_small_jacobian(rng)
            res = steepest_from_jacobian(jac, OrderingSpec.canonical(jac.shape[0]))
            assert np.all(res.dual_weights >= -1e-14)
            assert np.sum(res.dual_weights) == pytest.approx(1.0, abs=1e-9)
            assert res.kkt_residual <= 1e-7

    def test_direction_is_minus_weighted_gradient(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            jac = random_small_jacobian(rng)
            spec = OrderingSpec.canonical(jac.shape[0])
            res = steepest_from_jacobian(jac, spec)
            rows = spec.generators @ jac
            np.testing.assert_allclose(
                res.direction, -(rows.T @ res.dual_weights), atol=1e-12
            )


class TestAgainstOracle:
    def test_random_instances_match_grid_refinement(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            jac = random_small_jacobian(rng)
            dir_err, val_err = compare_with_oracle(
                jac, OrderingSpec.canonical(jac.shape[0])
            )
            assert dir_err <= 1e-3
            assert val_err <= 1e-6

    def test_oracle_zero_on_critical_instance(self):
        jac = np.array([[1.0, 1.0], [-1.0, -1.0]])
        d, v = brute_force_steepest(jac, CANON2)
        np.testing.assert_allclose(d, np.zeros(2), atol=1e-7)
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_oracle_exact_on_smooth_instance(self):
        jac = np.array([[3.0, -1.0]])
        d, v = brute_force_steepest(jac, OrderingSpec.canonical(1))
        np.testing.assert_allclose(d, -jac[0], atol=1e-6)
        assert v == pytest.approx(-5.0, abs=1e-9)


class TestProblemLevelWrappers:
    def test_steepest_direction_uses_problem_jacobian(self):
        from mocg import get_problem

        p = get_problem("EX1")
        x = np.array([1.5, 0.9])
        res = steepest_direction(p, x, CANON2)
        ref = steepest_from_jacobian(p.jacobian(x), CANON2)
        np.testing.assert_array_equal(res.direction, ref.direction)

    def test_criticality_negative_away_from_critical_set(self):
        from mocg import get_problem

        p = get_problem("EX1")
        assert criticality(p, np.array([1.5, 0.9]), CANON2) < -1e-3

    def test_subproblem_error_carries_diagnostics(self):
        err = SubproblemError("nope", weights=np.ones(2), residual=0.5)
        assert err.weights is not None and err.residual == 0.5
