"""Worst-case directional derivative and the steepest-descent subproblem.

The scalarization of an m x n Jacobian J along a direction d is

    max_v <J d, v>   over the ordering's generator rows v,

negative exactly for descent directions.  The steepest direction
minimizes this quantity plus ``0.5 * ||d||^2``; its negative optimal
value is the criticality measure used for stopping.  The minimizer is
obtained from the dual problem

    minimize 0.5 * || sum_j w_j a_j ||^2   over the unit simplex,

with a_j the j-th generator pulled back through the Jacobian, and the
direction recovered as minus the optimal combination.
"""

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, OrderingSpec


class SubproblemError(RuntimeError):
    """The weight subproblem did not reach its target residual."""

    def __init__(self, message, weights=None, residual=None):
        super().__init__(message)
        self.weights = weights
        self.residual = residual


@dataclass
class SteepestResult:
    """Solution of the steepest-descent subproblem at one point.

    ``theta`` is the subproblem optimal value (the criticality measure),
    ``dual_weights`` the simplex weights over the ordering generators and
    ``kkt_residual`` the complementarity gap of the weight subproblem,
    measured on data scaled by the largest pulled-back gradient norm so
    that the tolerance is meaningful regardless of objective scaling.
    """

    direction: np.ndarray
    theta: float
    dual_weights: np.ndarray
    kkt_residual: float


def max_dir_deriv(jac: np.ndarray, d: np.ndarray, ordering: OrderingSpec) -> float:
    """Worst-case directional derivative max_v <J d, v> over the generators.

    Exact maximum over the finite generator set; ties resolve to the same
    value so no tolerance is involved.
    """
    jac = np.asarray(jac, dtype=float)
    d = np.asarray(d, dtype=float)
    if jac.ndim != 2:
        raise DimensionError("jacobian must be a 2-d array")
    if jac.shape[0] != ordering.m:
        raise DimensionError(
            f"jacobian has {jac.shape[0]} rows, ordering expects {ordering.m}"
        )
    if d.shape != (jac.shape[1],):
        raise DimensionError(
            f"direction length {d.shape} does not match jacobian columns {jac.shape[1]}"
        )
    return float(np.max(ordering.generators @ (jac @ d)))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Exact Euclidean projection onto the unit simplex (sort based)."""
    v = np.asarray(v, dtype=float)
    a = -np.sort(-v)
    cums = (np.cumsum(a) - 1.0) / np.arange(1, v.size + 1)
    # largest k with a_k above its running threshold marks the support
    k = np.nonzero(a > cums)[0][-1]
    return np.maximum(v - cums[k], 0.0)


def _residual(w: np.ndarray, grad: np.ndarray) -> float:
    # complementarity gap of min 0.5 w^T G w over the simplex; zero at optimum
    return float(w @ grad - np.min(grad))


def _polish(gram: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Solve the weight subproblem exactly on a candidate support.

    Classic active-set refinement: solve the equality-constrained KKT
    system on the support, drop the most negative weight and repeat until
    feasible.  Returns a feasible weight vector (not necessarily optimal;
    the caller keeps it only when it lowers the residual).
    """
    p = gram.shape[0]
    idx = np.flatnonzero(support)
    while idx.size > 1:
        sub = gram[np.ix_(idx, idx)]
        k = idx.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = sub
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs)[:k]
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
        if np.all(sol >= -1e-13):
            w = np.zeros(p)
            w[idx] = np.maximum(sol, 0.0)
            s = w.sum()
            if s > 0:
                return w / s
            break
        idx = np.delete(idx, int(np.argmin(sol)))
    w = np.zeros(p)
    w[idx if idx.size else [0]] = 1.0
    return w / w.sum()


# polish is attempted on supports up to this size; larger supports are
# first thinned out by the projected-gradient iteration itself
_POLISH_MAX_SUPPORT = 32
_POLISH_EVERY = 64


def _solve_weights(rows: np.ndarray, tol: float, max_iter: int = 10000):
    """Minimize 0.5 * ||rows^T w||^2 over the unit simplex.

    Projected gradient with the exact sort-based simplex projection and
    fixed step 1/||G||, G the Gram matrix of the rows, run on data scaled
    by the largest row norm.  A periodic active-set polish solves the
    subproblem exactly on the current support, which the plain iteration
    needs to reach tight residuals when row norms span many orders of
    magnitude.  Raises SubproblemError when the residual target is not
    met within the iteration budget.
    """
    p = rows.shape[0]
    if p == 1:
        return np.ones(1), 0.0
    gram = rows @ rows.T
    gram = 0.5 * (gram + gram.T)
    # a vertex e_j is optimal iff column j of the Gram matrix is bounded
    # below by its diagonal entry; the test is exact and scale
    # invariant, and vertex solutions dominate along stalled valleys, so
    # short-circuit before paying for the eigenvalue and polish steps
    j = int(np.argmin(np.diag(gram)))
    if (
        bool(np.all(np.isfinite(gram)))
        and bool(np.all(gram[:, j] >= gram[j, j]))
    ):
        w = np.zeros(p)
        w[j] = 1.0
        return w, 0.0
    scale = float(np.max(np.diag(gram)))
    if scale == 0.0 or not np.isfinite(scale):
        if scale == 0.0:
            return np.full(p, 1.0 / p), 0.0
        raise SubproblemError("non-finite gradient data", residual=np.inf)
    gram = gram / scale
    lip = float(np.linalg.eigvalsh(gram)[-1])
    if lip <= 0.0:
        return np.full(p, 1.0 / p), 0.0
    w = np.full(p, 1.0 / p)
    best_w, best_res = w, np.inf
    for it in range(max_iter):
        grad = gram @ w
        res = _residual(w, grad)
        if res < best_res:
            best_w, best_res = w, res
        if res <= tol:
            return w, res
        if it % _POLISH_EVERY == 0:
            support = w > 0.0
            if support.sum() > _POLISH_MAX_SUPPORT:
                # keep the heaviest weights as the candidate support
                support = np.zeros(p, dtype=bool)
                support[np.argsort(-w)[:_POLISH_MAX_SUPPORT]] = True
            cand = _polish(gram, support)
            cand_res = _residual(cand, gram @ cand)
            if cand_res < res:
                w = cand
                if cand_res < best_res:
                    best_w, best_res = w, cand_res
                if cand_res <= tol:
                    return w, cand_res
                continue
        w = project_simplex(w - grad / lip)
    raise SubproblemError(
        f"weight subproblem stalled at residual {best_res:.3e} (target {tol:.1e})",
        weights=best_w,
        residual=best_res,
    )


def steepest_from_jacobian(
    jac: np.ndarray, ordering: OrderingSpec, tol: float = 1e-12
) -> SteepestResult:
    """Steepest-descent subproblem solved for an already evaluated Jacobian."""
    jac = np.asarray(jac, dtype=float)
    if jac.ndim != 2 or jac.shape[0] != ordering.m:
        raise DimensionError("jacobian shape does not match ordering")
    rows = ordering.generators @ jac
    weights, residual = _solve_weights(rows, tol)
    direction = -(rows.T @ weights)
    dd = float(np.max(rows @ direction))
    # the zero direction is feasible with value zero, so the true optimum
    # is never positive; clamp away the solver's last rounding
    theta = min(0.0, dd + 0.5 * float(direction @ direction))
    return SteepestResult(
        direction=direction, theta=theta, dual_weights=weights, kkt_residual=residual
    )


def steepest_direction(problem, x, ordering: OrderingSpec, tol: float = 1e-12) -> SteepestResult:
    """Steepest-descent subproblem at a point of a problem."""
    x = np.asarray(x, dtype=float)
    return steepest_from_jacobian(problem.jacobian(x), ordering, tol)


def criticality(problem, x, ordering: OrderingSpec, tol: float = 1e-12) -> float:
    """Criticality measure Theta(x): zero at critical points, negative elsewhere."""
    return steepest_direction(problem, x, ordering, tol).theta
