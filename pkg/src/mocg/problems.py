"""Benchmark problem collection and registry.

Unconstrained multiobjective test problems drawn from the numerical
optimization literature; the box attached to each problem only bounds the
starting points, iterates roam freely.  Evaluators are module-level
functions (bound with ``functools.partial``) so problem instances can be
shipped to worker processes.
"""

import math
from functools import partial

import numpy as np

from .core import Problem


class UnknownProblemError(KeyError):
    """Lookup of a problem name or variant the registry does not hold."""


# ---------------------------------------------------------------------------
# EX1: two-objective smooth example
# ---------------------------------------------------------------------------


def _ex1_f(x):
    """f1 = (x1^2 + sin x2)/2, f2 = ((x1-1)^2 - (x2-1)^2)/2."""
    return np.array(
        [
            0.5 * (x[0] ** 2 + math.sin(x[1])),
            0.5 * ((x[0] - 1.0) ** 2 - (x[1] - 1.0) ** 2),
        ]
    )


def _ex1_jac(x):
    return np.array(
        [
            [x[0], 0.5 * math.cos(x[1])],
            [x[0] - 1.0, -(x[1] - 1.0)],
        ]
    )


# ---------------------------------------------------------------------------
# AP3
# Reference: Ansary, Panda, "A modified Quasi-Newton method for vector
# optimization problem", Optimization 64 (2015).
# ---------------------------------------------------------------------------


def _ap3_f(x):
    """f1 = ((x1-1)^4 + 2 (x2-2)^4)/4, f2 = (x2 - x1^2)^2 + (1 - x1)^2."""
    return np.array(
        [
            0.25 * ((x[0] - 1.0) ** 4 + 2.0 * (x[1] - 2.0) ** 4),
            (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2,
        ]
    )


def _ap3_jac(x):
    return np.array(
        [
            [(x[0] - 1.0) ** 3, 2.0 * (x[1] - 2.0) ** 3],
            [
                -4.0 * x[0] * (x[1] - x[0] ** 2) - 2.0 * (1.0 - x[0]),
                2.0 * (x[1] - x[0] ** 2),
            ],
        ]
    )


# ---------------------------------------------------------------------------
# Far1: sums of Gaussian bumps.
# Reference: Huband, Hingston, Barone, While, "A review of multiobjective
# test problems and a scalable test problem toolkit", IEEE Trans. Evol.
# Comput. 10 (2006).
# ---------------------------------------------------------------------------

# (coefficient, sharpness, center_x1, center_x2) per bump
_FAR1_BUMPS_F1 = np.array(
    [
        [-2.0, 15.0, 0.1, 0.0],
        [-1.0, 20.0, 0.6, 0.6],
        [1.0, 20.0, -0.6, 0.6],
        [1.0, 20.0, 0.6, -0.6],
        [1.0, 20.0, -0.6, -0.6],
    ]
)
_FAR1_BUMPS_F2 = np.array(
    [
        [2.0, 20.0, 0.0, 0.0],
        [1.0, 20.0, 0.4, 0.6],
        [-1.0, 20.0, -0.5, 0.7],
        [-1.0, 20.0, 0.5, -0.7],
        [1.0, 20.0, -0.4, 0.8],
    ]
)


def _gauss_sum(x, bumps):
    dx = x[0] - bumps[:, 2]
    dy = x[1] - bumps[:, 3]
    return float(np.sum(bumps[:, 0] * np.exp(-bumps[:, 1] * (dx * dx + dy * dy))))


def _gauss_sum_grad(x, bumps):
    dx = x[0] - bumps[:, 2]
    dy = x[1] - bumps[:, 3]
    e = bumps[:, 0] * np.exp(-bumps[:, 1] * (dx * dx + dy * dy))
    return np.array(
        [
            float(np.sum(e * (-2.0 * bumps[:, 1] * dx))),
            float(np.sum(e * (-2.0 * bumps[:, 1] * dy))),
        ]
    )


def _far1_f(x):
    return np.array([_gauss_sum(x, _FAR1_BUMPS_F1), _gauss_sum(x, _FAR1_BUMPS_F2)])


def _far1_jac(x):
    return np.vstack(
        (_gauss_sum_grad(x, _FAR1_BUMPS_F1), _gauss_sum_grad(x, _FAR1_BUMPS_F2))
    )


# ---------------------------------------------------------------------------
# FDS: convex three-objective family with free dimension.
# Reference: Fliege, Grana Drummond, Svaiter, "Newton's method for
# multiobjective optimization", SIAM J. Optim. 20 (2009).
# ---------------------------------------------------------------------------


def _fds_f(x, idx, w1, w3):
    # w1 = idx/n^2 and w3 = idx(n-idx+1)/(n(n+1)) are fixed per instance;
    # these evaluators sit on the benchmark's hot path
    shift = x - idx
    sq = shift * shift
    return np.array(
        [
            float(w1 @ (sq * sq)),
            math.exp(float(np.sum(x)) / x.size) + float(x @ x),
            float(w3 @ np.exp(-x)),
        ]
    )


def _fds_jac(x, idx, w1, w3):
    n = x.size
    shift = x - idx
    out = np.empty((3, n))
    out[0] = 4.0 * w1 * (shift * shift * shift)
    out[1] = math.exp(float(np.sum(x)) / n) / n + 2.0 * x
    out[2] = -w3 * np.exp(-x)
    return out


# ---------------------------------------------------------------------------
# Hil1: polar-form surface with trigonometric angle and radius.
# Reference: Hillermeier, "Nonlinear Multiobjective Optimization: A
# Generalized Homotopy Approach", Birkhauser (2001).
# ---------------------------------------------------------------------------

_HIL1_DEG = 2.0 * math.pi / 360.0


def _hil1_parts(x):
    a = _HIL1_DEG * (
        45.0 + 40.0 * math.sin(2.0 * math.pi * x[0]) + 25.0 * math.sin(2.0 * math.pi * x[1])
    )
    b = 1.0 + 0.5 * math.cos(2.0 * math.pi * x[0])
    da1 = _HIL1_DEG * 40.0 * 2.0 * math.pi * math.cos(2.0 * math.pi * x[0])
    da2 = _HIL1_DEG * 25.0 * 2.0 * math.pi * math.cos(2.0 * math.pi * x[1])
    db1 = -math.pi * math.sin(2.0 * math.pi * x[0])
    return a, b, da1, da2, db1


def _hil1_f(x):
    a, b, _, _, _ = _hil1_parts(x)
    return np.array([math.cos(a) * b, math.sin(a) * b])


def _hil1_jac(x):
    a, b, da1, da2, db1 = _hil1_parts(x)
    sa, ca = math.sin(a), math.cos(a)
    return np.array(
        [
            [-sa * da1 * b + ca * db1, -sa * da2 * b],
            [ca * da1 * b + sa * db1, ca * da2 * b],
        ]
    )


# ---------------------------------------------------------------------------
# Lov3 / Lov4, stated for minimization.
# Reference: Lovison, "Singular continuation: generating piecewise linear
# approximations to Pareto sets via global analysis", SIAM J. Optim. 21
# (2011).
# ---------------------------------------------------------------------------


def _lov3_f(x):
    return np.array(
        [x[0] ** 2 + x[1] ** 2, (x[0] - 6.0) ** 2 + (x[1] + 0.3) ** 2]
    )


def _lov3_jac(x):
    return np.array(
        [[2.0 * x[0], 2.0 * x[1]], [2.0 * (x[0] - 6.0), 2.0 * (x[1] + 0.3)]]
    )


def _lov4_f(x):
    e1 = math.exp(-((x[0] + 2.0) ** 2) - x[1] ** 2)
    e2 = math.exp(-((x[0] - 2.0) ** 2) - x[1] ** 2)
    return np.array(
        [
            x[0] ** 2 + x[1] ** 2 + 4.0 * (e1 + e2),
            (x[0] - 6.0) ** 2 + (x[1] + 0.5) ** 2,
        ]
    )


def _lov4_jac(x):
    e1 = math.exp(-((x[0] + 2.0) ** 2) - x[1] ** 2)
    e2 = math.exp(-((x[0] - 2.0) ** 2) - x[1] ** 2)
    g1 = np.array(
        [
            2.0 * x[0] - 8.0 * ((x[0] + 2.0) * e1 + (x[0] - 2.0) * e2),
            2.0 * x[1] - 8.0 * x[1] * (e1 + e2),
        ]
    )
    g2 = np.array([2.0 * (x[0] - 6.0), 2.0 * (x[1] + 0.5)])
    return np.vstack((g1, g2))


# ---------------------------------------------------------------------------
# MGH16 (Brown and Dennis) and MGH26 (trigonometric), one objective per
# residual.  MGH26 squares its residuals so all objectives are bounded
# below by zero.
# Reference: More, Garbow, Hillstrom, "Testing unconstrained optimization
# software", ACM Trans. Math. Softw. 7 (1981).
# ---------------------------------------------------------------------------


def _mgh16_f(x, t):
    r = x[0] + t * x[1] - np.exp(t)
    s = x[2] + x[3] * np.sin(t) - np.cos(t)
    return r * r + s * s


def _mgh16_jac(x, t):
    r = x[0] + t * x[1] - np.exp(t)
    s = x[2] + x[3] * np.sin(t) - np.cos(t)
    jac = np.empty((t.size, 4))
    jac[:, 0] = 2.0 * r
    jac[:, 1] = 2.0 * r * t
    jac[:, 2] = 2.0 * s
    jac[:, 3] = 2.0 * s * np.sin(t)
    return jac


def _mgh26_f(x):
    n = x.size
    i = np.arange(1, n + 1)
    r = n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)
    return r * r


def _mgh26_jac(x):
    n = x.size
    i = np.arange(1, n + 1)
    r = n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)
    # d r_i / d x_j = sin(x_j) for j != i, plus (i sin(x_i) - cos(x_i)) on the diagonal
    dr = np.tile(np.sin(x), (n, 1))
    dr[np.diag_indices(n)] += i * np.sin(x) - np.cos(x)
    return 2.0 * r[:, None] * dr


# ---------------------------------------------------------------------------
# MMR5: scalable nonconvex two-objective pair.  The source collection's
# variable-dimension formulas were not available for transcription, so
# this entry pairs a chained Rosenbrock valley with a shifted sphere to
# match the roster's sizes and nonconvexity; results on it describe this
# reconstruction, not the original.
# ---------------------------------------------------------------------------


def _mmr5_f(x):
    n = x.size
    f1 = float(
        np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)
    ) / n
    f2 = float(np.sum((x + 1.0) ** 2)) / n
    return np.array([f1, f2])


def _mmr5_jac(x):
    n = x.size
    g1 = np.zeros(n)
    g1[:-1] += -400.0 * x[:-1] * (x[1:] - x[:-1] ** 2) - 2.0 * (1.0 - x[:-1])
    g1[1:] += 200.0 * (x[1:] - x[:-1] ** 2)
    g2 = 2.0 * (x + 1.0)
    return np.vstack((g1 / n, g2 / n))


# ---------------------------------------------------------------------------
# MOP5 and MOP7 (Viennet surfaces).
# Reference: Huband, Hingston, Barone, While, IEEE Trans. Evol. Comput. 10
# (2006).
# ---------------------------------------------------------------------------


def _mop5_f(x):
    r = x[0] ** 2 + x[1] ** 2
    return np.array(
        [
            0.5 * r + math.sin(r),
            (3.0 * x[0] - 2.0 * x[1] + 4.0) ** 2 / 8.0
            + (x[0] - x[1] + 1.0) ** 2 / 27.0
            + 15.0,
            1.0 / (r + 1.0) - 1.1 * math.exp(-r),
        ]
    )


def _mop5_jac(x):
    r = x[0] ** 2 + x[1] ** 2
    c = 1.0 + 2.0 * math.cos(r)
    g1 = np.array([c * x[0], c * x[1]])
    u = 3.0 * x[0] - 2.0 * x[1] + 4.0
    v = x[0] - x[1] + 1.0
    g2 = np.array([0.75 * u + 2.0 * v / 27.0, -0.5 * u - 2.0 * v / 27.0])
    w = -2.0 / (r + 1.0) ** 2 + 2.2 * math.exp(-r)
    g3 = np.array([w * x[0], w * x[1]])
    return np.vstack((g1, g2, g3))


def _mop7_f(x):
    return np.array(
        [
            (x[0] - 2.0) ** 2 / 2.0 + (x[1] + 1.0) ** 2 / 13.0 + 3.0,
            (x[0] + x[1] - 3.0) ** 2 / 36.0 + (-x[0] + x[1] + 2.0) ** 2 / 8.0 - 17.0,
            (x[0] + 2.0 * x[1] - 1.0) ** 2 / 175.0 + (2.0 * x[1] - x[0]) ** 2 / 17.0
            - 13.0,
        ]
    )


def _mop7_jac(x):
    u = x[0] + x[1] - 3.0
    v = -x[0] + x[1] + 2.0
    p = x[0] + 2.0 * x[1] - 1.0
    q = 2.0 * x[1] - x[0]
    return np.array(
        [
            [x[0] - 2.0, 2.0 * (x[1] + 1.0) / 13.0],
            [u / 18.0 - v / 4.0, u / 18.0 + v / 4.0],
            [2.0 * p / 175.0 - 2.0 * q / 17.0, 4.0 * p / 175.0 + 4.0 * q / 17.0],
        ]
    )


# ---------------------------------------------------------------------------
# SLC2: convex scalable pair, one quartic coordinate.
# Reference: Schutze, Lara, Coello Coello, "The directed search method for
# unconstrained multi-objective optimization problems" (2011).
# ---------------------------------------------------------------------------


def _slc2_f(x):
    f1 = (x[0] - 1.0) ** 4 + float(np.sum((x[1:] - 1.0) ** 2))
    f2 = float(np.sum((x + 1.0) ** 2))
    return np.array([f1, f2])


def _slc2_jac(x):
    g1 = 2.0 * (x - 1.0)
    g1[0] = 4.0 * (x[0] - 1.0) ** 3
    g2 = 2.0 * (x + 1.0)
    return np.vstack((g1, g2))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _box(n, low, high):
    return np.tile([low, high], (n, 1)).astype(float)


def _make_ex1():
    return Problem("EX1", 2, 2, _ex1_f, _ex1_jac, _box(2, -2.0, 2.0))


def _make_ap3():
    return Problem("AP3", 2, 2, _ap3_f, _ap3_jac, _box(2, -2.0, 2.0))


def _make_far1():
    return Problem("Far1", 2, 2, _far1_f, _far1_jac, _box(2, -1.0, 1.0))


def _make_fds(n, label):
    idx = np.arange(1, n + 1, dtype=float)
    w1 = idx / n**2
    w3 = idx * (n - idx + 1) / (n * (n + 1))
    return Problem(
        label,
        n,
        3,
        partial(_fds_f, idx=idx, w1=w1, w3=w3),
        partial(_fds_jac, idx=idx, w1=w1, w3=w3),
        _box(n, -2.0, 2.0),
        convex=True,
    )


def _make_hil1():
    return Problem("Hil1", 2, 2, _hil1_f, _hil1_jac, _box(2, 0.0, 1.0))


def _make_lov3():
    return Problem("Lov3", 2, 2, _lov3_f, _lov3_jac, _box(2, -100.0, 100.0))


def _make_lov4():
    return Problem("Lov4", 2, 2, _lov4_f, _lov4_jac, _box(2, -100.0, 100.0))


def _make_mgh16(m, label):
    t = np.arange(1, m + 1, dtype=float) / 5.0
    box = np.array([[-25.0, 25.0], [-5.0, 5.0], [-5.0, 5.0], [-1.0, 1.0]])
    return Problem(
        label,
        4,
        m,
        partial(_mgh16_f, t=t),
        partial(_mgh16_jac, t=t),
        box,
        # objectives are quadratic in x, so a larger difference step loses
        # no truncation accuracy while taming the huge function values
        fd_step=1e-3,
    )


def _make_mgh26():
    return Problem("MGH26", 4, 4, _mgh26_f, _mgh26_jac, _box(4, -1.0, 1.0))


def _make_mmr5(n, low, high, label):
    return Problem(label, n, 2, _mmr5_f, _mmr5_jac, _box(n, low, high))


def _make_mop5():
    return Problem("MOP5", 2, 3, _mop5_f, _mop5_jac, _box(2, -1.0, 1.0))


def _make_mop7():
    return Problem("MOP7", 2, 3, _mop7_f, _mop7_jac, _box(2, -400.0, 400.0), convex=True)


def _make_slc2(n, low, high, label):
    return Problem(
        label, n, 2, _slc2_f, _slc2_jac, _box(n, low, high), convex=True
    )


_BUILDERS = {
    "AP3": _make_ap3,
    "EX1": _make_ex1,
    "Far1": _make_far1,
    "FDS-1": partial(_make_fds, 2, "FDS-1"),
    "FDS-2": partial(_make_fds, 100, "FDS-2"),
    "FDS-3": partial(_make_fds, 150, "FDS-3"),
    "Hil1": _make_hil1,
    "Lov3": _make_lov3,
    "Lov4": _make_lov4,
    "MGH16-1": partial(_make_mgh16, 50, "MGH16-1"),
    "MGH16-2": partial(_make_mgh16, 100, "MGH16-2"),
    "MGH26": _make_mgh26,
    "MMR5-1": partial(_make_mmr5, 1000, -10.0, 10.0, "MMR5-1"),
    "MMR5-2": partial(_make_mmr5, 200, -100.0, 100.0, "MMR5-2"),
    "MOP5": _make_mop5,
    "MOP7": _make_mop7,
    "SLC2-1": partial(_make_slc2, 1000, -10.0, 10.0, "SLC2-1"),
    "SLC2-2": partial(_make_slc2, 200, -100.0, 100.0, "SLC2-2"),
    "SLC2-3": partial(_make_slc2, 1000, -100.0, 100.0, "SLC2-3"),
}

# dimension-parameterized family access: family name + the size that varies
_FAMILY_VARIANTS = {
    ("FDS", ("n", 2)): "FDS-1",
    ("FDS", ("n", 100)): "FDS-2",
    ("FDS", ("n", 150)): "FDS-3",
    ("MGH16", ("m", 50)): "MGH16-1",
    ("MGH16", ("m", 100)): "MGH16-2",
    ("MMR5", ("n", 1000)): "MMR5-1",
    ("MMR5", ("n", 200)): "MMR5-2",
    ("SLC2", ("n", 200)): "SLC2-2",
}

_CANONICAL = {name.lower(): name for name in _BUILDERS}


def problem_names():
    """Registered labels in roster order."""
    return sorted(_BUILDERS)


def get_problem(name: str, n: int = None, m: int = None) -> Problem:
    """Build a registered problem by label or by family plus size.

    ``get_problem("FDS-2")`` and ``get_problem("FDS", n=100)`` denote the
    same instance.  Unknown names or sizes raise UnknownProblemError
    listing what the registry holds.
    """
    key = name.strip()
    if n is not None or m is not None:
        param = ("n", n) if n is not None else ("m", m)
        label = _FAMILY_VARIANTS.get((key.upper(), param))
        if label is None:
            valid = sorted({f for f, _ in _FAMILY_VARIANTS})
            raise UnknownProblemError(
                f"no variant {key!r} with {param[0]}={param[1]}; "
                f"parameterized families: {valid}"
            )
        return _BUILDERS[label]()
    label = _CANONICAL.get(key.lower())
    if label is None:
        raise UnknownProblemError(
            f"unknown problem {name!r}; known: {', '.join(problem_names())}"
        )
    return _BUILDERS[label]()


def list_problems():
    """Metadata manifest for every registered problem."""
    rows = []
    for label in problem_names():
        p = _BUILDERS[label]()
        rows.append(
            {
                "name": p.name,
                "n": p.n,
                "m": p.m,
                "convex": p.convex,
                "box_low": p.box[:, 0].tolist(),
                "box_high": p.box[:, 1].tolist(),
            }
        )
    return rows
