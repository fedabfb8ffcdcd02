"""Multi-start experiment harness.

Runs (problem, method, start) grids with paired starting points, aggregates
success rates and medians, builds performance profiles, and exports final
points for Pareto-front plotting.  Output files are plain CSV with a
commented manifest header; nothing here depends on wall-clock ordering, so
re-running a spec reproduces every non-timing byte.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__ as _pkg_version
from .core import sample_initial_point
from .problems import get_problem
from .solver import (
    METHODS,
    STATUS_CONVERGED,
    RunResult,
    SolverConfig,
    slim_record,
    solve,
    verify_run,
)

PROFILE_MEASURES = ("iterations", "obj_evals", "jac_evals", "wall_time")


@dataclass
class ExperimentSpec:
    """Grid definition: which problems, which methods, how many starts."""

    problems: list
    methods: list
    starts_per_problem: int = 100
    base_seed: int = 0
    # per-method SolverConfig overrides, keyed by method name
    configs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.problems:
            raise ValueError("experiment needs at least one problem")
        if not self.methods:
            raise ValueError("experiment needs at least one method")
        self.methods = [m.strip().lower() for m in self.methods]
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if self.starts_per_problem < 1:
            raise ValueError("starts_per_problem must be >= 1")
        self.configs = {k.strip().lower(): v for k, v in self.configs.items()}

    def config_for(self, method: str) -> SolverConfig:
        cfg = self.configs.get(method)
        if cfg is None:
            return SolverConfig(method=method)
        if cfg.method != method:
            cfg = replace(cfg, method=method)
        return cfg


@dataclass
class BenchRun:
    """One solve of one problem from one start."""

    problem: str
    method: str
    start: int
    seed: int
    x0: np.ndarray
    result: RunResult
    violations: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.result.status == STATUS_CONVERGED

    @property
    def iterations(self) -> int:
        return self.result.trace[-1].k if self.result.trace else 0


@dataclass
class MetricsRow:
    problem: str
    method: str
    success_rate_percent: float
    median_iterations: Optional[float]
    median_obj_evals: Optional[float]
    median_jac_evals: Optional[float]
    median_wall_time: Optional[float]


@dataclass
class ProfileCurve:
    method: str
    measure: str
    # nondecreasing (omega, rho) breakpoints; rho in [0, 1]
    points: list


def _run_one(task):
    problem_name, method, start, seed, config, validate, keep_traces = task
    problem = get_problem(problem_name)
    x0 = sample_initial_point(problem, rng_seed=seed)
    result = solve(problem, x0, config=config)
    violations = []
    if validate:
        violations = verify_run(result, problem, config)
    if not keep_traces:
        result = replace(result, trace=[slim_record(r) for r in result.trace])
    return BenchRun(
        problem=problem_name,
        method=method,
        start=start,
        seed=seed,
        x0=x0,
        result=result,
        violations=violations,
    )


def run_experiment(
    spec: ExperimentSpec,
    workers: Optional[int] = None,
    validate: bool = False,
    keep_traces: bool = False,
):
    """Execute the full grid and return runs sorted by (problem, method, start).

    Starting points are paired: every method sees the identical x0 for a
    given (problem, start) pair, with the seed derived as base_seed + start.
    Individual run failures land in the result status; they never abort the
    grid.  ``workers`` > 1 fans runs out over processes; the returned order
    is independent of completion order either way.
    """
    # resolve every name up front so typos fail before any work is spent
    for name in spec.problems:
        get_problem(name)
    tasks = []
    for problem_name in spec.problems:
        for method in spec.methods:
            cfg = spec.config_for(method)
            for start in range(spec.starts_per_problem):
                seed = spec.base_seed + start
                tasks.append(
                    (problem_name, method, start, seed, cfg, validate, keep_traces)
                )
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, tasks, chunksize=4))
    else:
        runs = [_run_one(t) for t in tasks]
    runs.sort(key=lambda r: (r.problem, r.method, r.start))
    return runs


def _median(values) -> Optional[float]:
    if not values:
        return None
    return float(np.median(np.asarray(values, dtype=float)))


def _group(runs):
    groups = {}
    for run in runs:
        groups.setdefault((run.problem, run.method), []).append(run)
    return groups


def _measure_value(run: BenchRun, measure: str) -> float:
    if measure == "iterations":
        return float(run.iterations)
    if measure == "obj_evals":
        return float(run.result.counters.n_obj_evals)
    if measure == "jac_evals":
        return float(run.result.counters.n_jac_evals)
    if measure == "wall_time":
        return float(run.result.wall_time)
    raise ValueError(f"unknown measure {measure!r}; choose from {PROFILE_MEASURES}")


def aggregate_metrics(runs):
    """Success rates over all runs, medians over the successful ones."""
    if not runs:
        raise ValueError("no runs to aggregate")
    rows = []
    for (problem, method), group in sorted(_group(runs).items()):
        ok = [r for r in group if r.converged]
        rows.append(
            MetricsRow(
                problem=problem,
                method=method,
                success_rate_percent=100.0 * len(ok) / len(group),
                median_iterations=_median([r.iterations for r in ok]),
                median_obj_evals=_median(
                    [r.result.counters.n_obj_evals for r in ok]
                ),
                median_jac_evals=_median(
                    [r.result.counters.n_jac_evals for r in ok]
                ),
                median_wall_time=_median([r.result.wall_time for r in ok]),
            )
        )
    return rows


def performance_profile(runs, measure: str):
    """Dolan-More profile curves for one measure.

    Per (problem, method) the cost t is the median of the measure over that
    pair's successful runs; zero successes give t = inf and the pair never
    enters the curve.  rho_s(omega) = fraction of problems whose ratio
    t / (best t over methods) is <= omega.
    """
    if measure not in PROFILE_MEASURES:
        raise ValueError(f"unknown measure {measure!r}; choose from {PROFILE_MEASURES}")
    groups = _group(runs)
    problems = sorted({p for p, _ in groups})
    methods = sorted({m for _, m in groups})
    if len(methods) < 2:
        raise ValueError("profiles need at least two methods")
    cost = {}
    for (problem, method), group in groups.items():
        ok = [r for r in group if r.converged]
        med = _median([_measure_value(r, measure) for r in ok])
        cost[(problem, method)] = math.inf if med is None else med
    ratios = {m: [] for m in methods}
    for problem in problems:
        best = min(cost.get((problem, m), math.inf) for m in methods)
        for m in methods:
            t = cost.get((problem, m), math.inf)
            if math.isinf(t) or math.isinf(best):
                r = math.inf
            elif best == 0.0:
                r = 1.0 if t == 0.0 else math.inf
            else:
                r = t / best
            ratios[m].append(r)
    curves = []
    for m in methods:
        finite = sorted(r for r in ratios[m] if math.isfinite(r))
        n = len(problems)
        omegas = [1.0] + [r for r in finite if r > 1.0]
        points = []
        for omega in omegas:
            rho = sum(1 for r in finite if r <= omega) / n
            if points and points[-1][1] == rho:
                continue
            points.append((omega, rho))
        curves.append(ProfileCurve(method=m, measure=measure, points=points))
    return curves


def strictly_dominates(a, b, tol: float = 1e-6) -> bool:
    """True when a beats b in every component by more than tol."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a < b - tol))


def mutual_nondominance_fraction(vectors, tol: float = 1e-6) -> float:
    """Fraction of vectors not strictly dominated by any other vector."""
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        return 1.0
    clean = 0
    for i, v in enumerate(vecs):
        if not any(
            strictly_dominates(w, v, tol) for j, w in enumerate(vecs) if j != i
        ):
            clean += 1
    return clean / len(vecs)


def export_pareto_points(runs, problem_name: str):
    """Rows of (start point, final point, objectives, status) for one problem.

    One row per run, every status included; converged rows' final objective
    vectors approximate the Pareto frontier.  Returns a list of dicts in
    (method, start) order.
    """
    problem = get_problem(problem_name)
    rows = []
    for run in sorted(
        (r for r in runs if r.problem == problem_name),
        key=lambda r: (r.method, r.start),
    ):
        f0 = problem.objectives(run.x0)
        xf = run.result.final_point
        ff = problem.objectives(xf) if np.all(np.isfinite(xf)) else np.full(
            problem.m, math.nan
        )
        rows.append(
            {
                "method": run.method,
                "start": run.start,
                "seed": run.seed,
                "status": run.result.status,
                "x0": np.asarray(run.x0, dtype=float),
                "x_final": np.asarray(xf, dtype=float),
                "f0": np.asarray(f0, dtype=float),
                "f_final": np.asarray(ff, dtype=float),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# File output
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _header_lines(meta: dict):
    lines = [f"# mocg {_pkg_version}"]
    for key in sorted(meta):
        lines.append(f"# {key} = {_fmt(meta[key])}")
    return lines


def write_metrics_csv(rows, path, meta: Optional[dict] = None) -> None:
    with open(path, "w", newline="") as fh:
        for line in _header_lines(meta or {}):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            [
                "problem",
                "method",
                "success_rate_percent",
                "median_iterations",
                "median_obj_evals",
                "median_jac_evals",
                "median_wall_time",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.problem,
                    row.method,
                    _fmt(row.success_rate_percent),
                    _fmt(row.median_iterations),
                    _fmt(row.median_obj_evals),
                    _fmt(row.median_jac_evals),
                    _fmt(row.median_wall_time),
                ]
            )


def write_profiles_csv(curves, path, meta: Optional[dict] = None) -> None:
    with open(path, "w", newline="") as fh:
        for line in _header_lines(meta or {}):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["method", "measure", "omega", "rho"])
        for curve in curves:
            for omega, rho in curve.points:
                writer.writerow([curve.method, curve.measure, _fmt(omega), _fmt(rho)])


def write_pareto_csv(rows, path, meta: Optional[dict] = None) -> None:
    with open(path, "w", newline="") as fh:
        for line in _header_lines(meta or {}):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        if not rows:
            writer.writerow(["method", "start", "seed", "status"])
            return
        n = rows[0]["x0"].size
        m = rows[0]["f0"].size
        header = ["method", "start", "seed", "status"]
        header += [f"x0_{i + 1}" for i in range(n)]
        header += [f"xf_{i + 1}" for i in range(n)]
        header += [f"f0_{j + 1}" for j in range(m)]
        header += [f"ff_{j + 1}" for j in range(m)]
        writer.writerow(header)
        for row in rows:
            record = [row["method"], row["start"], row["seed"], row["status"]]
            record += [_fmt(float(v)) for v in row["x0"]]
            record += [_fmt(float(v)) for v in row["x_final"]]
            record += [_fmt(float(v)) for v in row["f0"]]
            record += [_fmt(float(v)) for v in row["f_final"]]
            writer.writerow(record)


def write_manifest(spec: ExperimentSpec, path, extra: Optional[dict] = None) -> None:
    """JSON manifest of the spec, seeds, and tolerances; no timestamps."""
    payload = {
        "version": _pkg_version,
        "problems": list(spec.problems),
        "methods": list(spec.methods),
        "starts_per_problem": spec.starts_per_problem,
        "base_seed": spec.base_seed,
        "configs": {
            method: {
                "method": cfg.method,
                "max_iters": cfg.max_iters,
                "stop_tol": cfg.stop_tol,
                "qp_tol": cfg.qp_tol,
                "rho": cfg.ls_params.rho,
                "sigma": cfg.ls_params.sigma,
                "mu": cfg.ls_params.mu,
            }
            for method in spec.methods
            for cfg in [spec.config_for(method)]
        },
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_out_dir() -> str:
    return os.environ.get("MOCG_OUT_DIR", os.path.join(os.getcwd(), "out"))
