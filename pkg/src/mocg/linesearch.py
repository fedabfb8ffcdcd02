"""Step length selection along a descent direction.

Both Wolfe-type searches enforce the componentwise Armijo decrease

    phi(x + a d)  precedes-or-equals  phi(x) + rho * a * lam0 * xi

in the ordering sense, plus a curvature band on the worst-case
directional derivative at the trial point,

    sigma * lam0  <=  lam(x + a d, d)  <=  -mu * lam0.

The strong variant is the special case mu = sigma, which turns the band
into ``|lam| <= sigma * |lam0|``.  The search expands the trial step
until a right bound appears, then bisects, shrinking toward the side
indicated by whichever condition failed at the midpoint.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import OrderingSpec
from .scalarize import max_dir_deriv


class LineSearchError(RuntimeError):
    """No acceptable step found within the trial budget."""


class NotDescentError(ValueError):
    """The supplied direction is not a descent direction."""


class NoRootError(RuntimeError):
    """The directional derivative does not change sign within the range."""


@dataclass
class LineSearchParams:
    rho: float = 1e-4
    sigma: float = 0.1
    mu: float = 0.2
    alpha_init: float = 1.0
    expand_factor: float = 2.0
    max_trials: int = 100

    def __post_init__(self):
        if not 0.0 < self.rho < self.sigma < 1.0:
            raise ValueError("need 0 < rho < sigma < 1")
        if self.mu < 0.0:
            raise ValueError("mu must be nonnegative")
        if self.alpha_init <= 0.0 or self.expand_factor <= 1.0:
            raise ValueError("alpha_init must be positive, expand_factor above 1")
        if self.max_trials < 1:
            raise ValueError("max_trials must be positive")


@dataclass
class LineSearchOutcome:
    """Accepted step with the data already evaluated at it.

    ``obj_at_step``, ``jac_at_step`` and ``dd_at_step`` are the objective
    vector, Jacobian and worst-case directional derivative at
    ``x_at_step = x + alpha * d``, returned so callers can reuse the
    evaluations that the accepting trial already paid for.
    """

    alpha: float
    trials: int
    obj_at_step: np.ndarray
    jac_at_step: np.ndarray
    dd_at_step: float
    x_at_step: np.ndarray
    satisfied: dict = field(default_factory=dict)


def armijo_holds(
    phi_trial: np.ndarray,
    phi0: np.ndarray,
    alpha: float,
    lam0: float,
    ordering: OrderingSpec,
    rho: float,
) -> bool:
    """Componentwise Armijo test in the ordering sense (NaN counts as failure)."""
    rhs = phi0 + rho * alpha * lam0 * ordering.xi
    gap = ordering.generators @ (np.asarray(phi_trial, dtype=float) - rhs)
    return bool(np.all(gap <= 0.0))


def curvature_holds(dd_trial: float, lam0: float, sigma: float, mu: float):
    """Lower and upper curvature flags; non-finite derivatives fail both."""
    if not np.isfinite(dd_trial):
        return False, False
    return dd_trial >= sigma * lam0, dd_trial <= -mu * lam0


def generalized_wolfe(
    problem,
    x: np.ndarray,
    d: np.ndarray,
    lam0: float,
    ordering: OrderingSpec,
    params: LineSearchParams,
    phi0: Optional[np.ndarray] = None,
    mu: Optional[float] = None,
) -> LineSearchOutcome:
    """Find a step satisfying Armijo decrease and the two-sided curvature band.

    ``lam0`` must be the (negative) worst-case directional derivative at
    ``x`` along ``d``; passing ``phi0`` skips re-evaluating the objective
    at ``x``.  Each trial costs one objective evaluation, plus one
    Jacobian evaluation only when the decrease test passes (a trial
    rejected by Armijo is too long no matter what the curvature says).
    Raises NotDescentError when ``lam0 >= 0`` and LineSearchError when
    the budget or the bracket is exhausted.
    """
    if not lam0 < 0.0:
        raise NotDescentError(f"lam0 = {lam0!r} is not negative")
    if mu is None:
        mu = params.mu
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if phi0 is None:
        phi0 = problem.objectives(x)
    phi0 = np.asarray(phi0, dtype=float)

    lo = 0.0
    hi = None
    alpha = params.alpha_init
    trials = 0
    while trials < params.max_trials:
        trials += 1
        x_t = x + alpha * d
        phi_t = np.asarray(problem.objectives(x_t), dtype=float)
        armijo = bool(np.all(np.isfinite(phi_t))) and armijo_holds(
            phi_t, phi0, alpha, lam0, ordering, params.rho
        )
        lower = upper = False
        if armijo:
            jac_t = np.asarray(problem.jacobian(x_t), dtype=float)
            dd_t = max_dir_deriv(jac_t, d, ordering)
            lower, upper = curvature_holds(dd_t, lam0, params.sigma, mu)
            if lower and upper:
                return LineSearchOutcome(
                    alpha=alpha,
                    trials=trials,
                    obj_at_step=phi_t,
                    jac_at_step=jac_t,
                    dd_at_step=dd_t,
                    x_at_step=x_t,
                    satisfied={
                        "armijo": True,
                        "lower_curvature": True,
                        "upper_curvature": True,
                    },
                )
        if hi is None:
            # expansion: walk right until the decrease or the upper
            # curvature bound breaks; stopping on Armijo alone could walk
            # lo past the whole acceptance band on flat objectives
            if armijo and upper:
                lo = alpha
                alpha = alpha * params.expand_factor
                continue
            hi = alpha
        else:
            # still too steep with the decrease intact: step too short;
            # any other failure (Armijo, overshoot, non-finite) too long
            if armijo and upper and not lower:
                lo = alpha
            else:
                hi = alpha
        if hi - lo <= 1e-16:
            raise LineSearchError(
                f"bracket collapsed to [{lo!r}, {hi!r}] after {trials} trials"
            )
        alpha = 0.5 * (lo + hi)
    raise LineSearchError(f"no acceptable step within {params.max_trials} trials")


def strong_wolfe(
    problem,
    x: np.ndarray,
    d: np.ndarray,
    lam0: float,
    ordering: OrderingSpec,
    params: LineSearchParams,
    phi0: Optional[np.ndarray] = None,
) -> LineSearchOutcome:
    """Strong Wolfe search: the generalized search specialized to mu = sigma."""
    return generalized_wolfe(
        problem, x, d, lam0, ordering, params, phi0=phi0, mu=params.sigma
    )


def exact_line_search(
    problem,
    x: np.ndarray,
    d: np.ndarray,
    ordering: OrderingSpec,
    alpha_max: float = 1e6,
    g_tol: float = 1e-10,
    alpha_init: float = 1.0,
    max_bisections: int = 200,
) -> float:
    """Smallest step at which the worst-case directional derivative vanishes.

    Expands from ``alpha_init`` by doubling until the derivative changes
    sign, then bisects the bracket down to ``|lam| <= g_tol``.  Raises
    NotDescentError when the direction is not descent at ``x`` and
    NoRootError when no sign change occurs up to ``alpha_max``.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)

    def g(a: float) -> float:
        return max_dir_deriv(problem.jacobian(x + a * d), d, ordering)

    g0 = g(0.0)
    if not g0 < 0.0:
        raise NotDescentError(f"lam(x, d) = {g0!r} is not negative")
    lo = 0.0
    a = min(alpha_init, alpha_max)
    while True:
        ga = g(a)
        if abs(ga) <= g_tol:
            return a
        if ga > 0.0:
            hi = a
            break
        lo = a
        if a >= alpha_max:
            raise NoRootError(f"no sign change up to alpha_max = {alpha_max}")
        a = min(a * 2.0, alpha_max)
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= g_tol:
            return mid
        if gm > 0.0:
            hi = mid
        else:
            lo = mid
    raise NoRootError(
        f"bisection did not reach |lam| <= {g_tol} (bracket [{lo}, {hi}])"
    )
