"""Search direction rules built on the steepest-descent subproblem.

The conjugate parameter is a Polak-Ribiere-Polyak ratio expressed through
the worst-case directional derivative lam:

    beta_k = max{0, (-lam(x_k, v_k) + lam(x_{k-1}, v_k)) / (-lam(x_{k-1}, v_{k-1}))}

with v the steepest direction at each point.  The three-term rule adds a
correction along v_k that restores the sufficient descent property

    lam(x_k, d_k) <= lam(x_k, v_k)

for every nonnegative beta, which the plain two-term update does not
guarantee.
"""

from dataclasses import dataclass

import numpy as np

from .core import OrderingSpec
from .scalarize import max_dir_deriv


class CriticalPointError(ValueError):
    """Direction update requested at (numerically) critical data."""


@dataclass
class DirectionState:
    """Data carried from the previous iterate for the conjugate update.

    The previous Jacobian is retained so the conjugate parameter can
    evaluate lam at the old point for the new steepest direction without
    a fresh Jacobian evaluation.
    """

    prev_direction: np.ndarray
    prev_lambda_steepest: float
    prev_point: np.ndarray
    prev_jacobian: np.ndarray


def prp_beta(
    steepest_new: np.ndarray,
    dd_steepest_new: float,
    state: DirectionState,
    ordering: OrderingSpec,
) -> float:
    """Nonnegative Polak-Ribiere-Polyak parameter at the new iterate.

    ``dd_steepest_new`` is lam at the new point along the new steepest
    direction and must be negative; the denominator reuses the same
    quantity stored for the previous iterate.
    """
    if not dd_steepest_new < 0.0:
        raise CriticalPointError(
            f"steepest directional derivative {dd_steepest_new!r} is not negative"
        )
    denom = -state.prev_lambda_steepest
    if denom <= 1e-300:
        raise CriticalPointError("previous iterate already critical")
    dd_old_of_new = max_dir_deriv(state.prev_jacobian, steepest_new, ordering)
    return max(0.0, (-dd_steepest_new + dd_old_of_new) / denom)


def three_term_direction(
    steepest_new: np.ndarray,
    dd_steepest_new: float,
    dd_prevdir_at_new: float,
    beta: float,
    state: DirectionState,
) -> np.ndarray:
    """Three-term update: steepest + beta * previous + correction.

    ``dd_prevdir_at_new`` is lam at the new point along the previous
    direction.  With beta = 0 the result is exactly the steepest
    direction.
    """
    if not dd_steepest_new < 0.0:
        raise CriticalPointError(
            f"steepest directional derivative {dd_steepest_new!r} is not negative"
        )
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    coef = 1.0 - beta * abs(dd_prevdir_at_new) / dd_steepest_new
    return coef * steepest_new + beta * state.prev_direction


def prp_plus_direction(
    steepest_new: np.ndarray, beta: float, state: DirectionState
) -> np.ndarray:
    """Two-term update without the correction; descent is not guaranteed."""
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    return steepest_new + beta * state.prev_direction


def sd_direction(steepest_new: np.ndarray) -> np.ndarray:
    """Steepest-descent rule: the subproblem direction itself."""
    return np.asarray(steepest_new, dtype=float)
