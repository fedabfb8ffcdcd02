"""Command-line entry point.

Subcommands: list, solve, bench, profile, pareto, check.  Output is
machine-readable by default (--pretty adds aligned tables where it
matters); every generated file starts with a commented manifest header.
Exit codes: 0 success, 1 the run or check did not succeed, 2 usage error.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .bench import (
    ExperimentSpec,
    PROFILE_MEASURES,
    aggregate_metrics,
    default_out_dir,
    export_pareto_points,
    performance_profile,
    run_experiment,
    write_manifest,
    write_metrics_csv,
    write_pareto_csv,
    write_profiles_csv,
)
from .checks import run_battery
from .core import sample_initial_point
from .linesearch import LineSearchParams
from .problems import UnknownProblemError, get_problem, list_problems
from .solver import METHODS, STATUS_CONVERGED, SolverConfig, solve


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


def _load_config_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return data


def _solver_config(args, cfg_file, method):
    # flags override config-file values, which override defaults
    ls = LineSearchParams(
        rho=float(cfg_file.get("rho", 1e-4)),
        sigma=float(cfg_file.get("sigma", 0.1)),
        mu=float(cfg_file.get("mu", 0.2)),
    )
    kwargs = {"method": method, "ls_params": ls}
    max_iters = (
        args.max_iters if args.max_iters is not None else cfg_file.get("max_iters")
    )
    if max_iters is not None:
        kwargs["max_iters"] = int(max_iters)
    tol = args.tol if args.tol is not None else cfg_file.get("stop_tol")
    if tol is not None:
        kwargs["stop_tol"] = float(tol)
    return SolverConfig(**kwargs)


def _experiment_spec(args, cfg_file):
    problems = args.problem or cfg_file.get("problems")
    if not problems:
        raise UsageError("no problems given; pass --problem or a --config file")
    methods = args.method or cfg_file.get("methods") or list(METHODS)
    starts = (
        args.starts
        if args.starts is not None
        else cfg_file.get("starts_per_problem", 100)
    )
    seed = args.seed if args.seed is not None else cfg_file.get("base_seed", 0)
    try:
        spec = ExperimentSpec(
            problems=list(problems),
            methods=list(methods),
            starts_per_problem=int(starts),
            base_seed=int(seed),
        )
        spec.configs = {
            m: _solver_config(args, cfg_file, m) for m in spec.methods
        }
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return spec


def _ensure_out_dir(args):
    out_dir = args.out_dir or default_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _meta(spec):
    cfg = spec.config_for(spec.methods[0])
    return {
        "base_seed": spec.base_seed,
        "starts_per_problem": spec.starts_per_problem,
        "stop_tol": cfg.stop_tol,
        "rho": cfg.ls_params.rho,
        "sigma": cfg.ls_params.sigma,
        "mu": cfg.ls_params.mu,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_list(args) -> int:
    rows = list_problems()
    if args.pretty:
        print(f"{'name':10} {'n':>5} {'m':>4} {'convex':>7}  box")
        for row in rows:
            lo, hi = row["box_low"][0], row["box_high"][0]
            print(
                f"{row['name']:10} {row['n']:>5} {row['m']:>4} "
                f"{'Y' if row['convex'] else 'N':>7}  [{lo:g}, {hi:g}]^n"
            )
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["name", "n", "m", "convex", "box_low", "box_high"])
        for row in rows:
            writer.writerow(
                [
                    row["name"],
                    row["n"],
                    row["m"],
                    int(row["convex"]),
                    row["box_low"][0],
                    row["box_high"][0],
                ]
            )
    return 0


def cmd_solve(args) -> int:
    cfg_file = _load_config_file(args.config) if args.config else {}
    method = (args.method_single or cfg_file.get("method") or "tt-prp").lower()
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {METHODS}")
    try:
        problem = get_problem(args.problem_name)
    except UnknownProblemError as exc:
        raise UsageError(str(exc)) from exc
    config = _solver_config(args, cfg_file, method)
    seed = args.seed if args.seed is not None else 0
    if args.x0:
        try:
            x0 = np.array([float(v) for v in args.x0.split(",")], dtype=float)
        except ValueError as exc:
            raise UsageError(f"cannot parse --x0 {args.x0!r}") from exc
        if x0.size != problem.n:
            raise UsageError(
                f"--x0 has {x0.size} components, {problem.name} needs {problem.n}"
            )
    else:
        x0 = sample_initial_point(problem, rng_seed=seed)
    result = solve(problem, x0, config=config)

    out_dir = _ensure_out_dir(args)
    path = os.path.join(
        out_dir, f"solve_{problem.name}_{method.replace('+', 'plus')}_seed{seed}.csv"
    )
    with open(path, "w", newline="") as fh:
        fh.write(f"# mocg {__version__}\n")
        fh.write(f"# problem = {problem.name}\n")
        fh.write(f"# method = {method}\n")
        fh.write(f"# seed = {seed}\n")
        fh.write(f"# stop_tol = {config.stop_tol!r}\n")
        fh.write(f"# status = {result.status}\n")
        writer = csv.writer(fh)
        header = [
            "k",
            "crit",
            "beta",
            "step",
            "dd_direction",
            "dd_steepest",
            "qp_residual",
            "n_obj_evals",
            "n_jac_evals",
            "n_subproblem_solves",
        ]
        header += [f"x_{i + 1}" for i in range(problem.n)]
        writer.writerow(header)
        for rec in result.trace:
            row = [
                rec.k,
                repr(rec.crit),
                repr(rec.beta),
                repr(rec.step),
                repr(rec.dd_direction),
                repr(rec.dd_steepest),
                repr(rec.qp_residual),
                rec.n_obj_evals,
                rec.n_jac_evals,
                rec.n_subproblem_solves,
            ]
            row += [repr(float(v)) for v in rec.x]
            writer.writerow(row)
    print(
        f"{problem.name} {method} seed={seed} status={result.status} "
        f"iters={result.trace[-1].k} crit={result.final_theta!r} trace={path}"
    )
    return 0 if result.status == STATUS_CONVERGED else 1


def cmd_bench(args) -> int:
    cfg_file = _load_config_file(args.config) if args.config else {}
    spec = _experiment_spec(args, cfg_file)
    runs = run_experiment(spec, workers=args.workers, validate=args.validate)
    bad = [r for r in runs if r.violations]
    rows = aggregate_metrics(runs)
    out_dir = _ensure_out_dir(args)
    metrics_path = os.path.join(out_dir, "metrics.csv")
    write_metrics_csv(rows, metrics_path, _meta(spec))
    write_manifest(spec, os.path.join(out_dir, "manifest.json"))
    if args.pretty:
        print(
            f"{'problem':10} {'method':8} {'%':>6} {'mit':>8} {'mf':>8} {'mg':>8}"
        )
        for row in rows:
            fmt = lambda v: "-" if v is None else f"{v:g}"
            print(
                f"{row.problem:10} {row.method:8} {row.success_rate_percent:>6.1f} "
                f"{fmt(row.median_iterations):>8} {fmt(row.median_obj_evals):>8} "
                f"{fmt(row.median_jac_evals):>8}"
            )
    print(f"wrote {metrics_path} ({len(runs)} runs)")
    if bad:
        for r in bad[:10]:
            for v in r.violations[:3]:
                print(
                    f"invariant violation: {r.problem}/{r.method}/start {r.start}: {v}",
                    file=sys.stderr,
                )
        print(f"{len(bad)} run(s) with invariant violations", file=sys.stderr)
        return 1
    return 0


def cmd_profile(args) -> int:
    cfg_file = _load_config_file(args.config) if args.config else {}
    spec = _experiment_spec(args, cfg_file)
    measure = args.measure
    runs = run_experiment(spec, workers=args.workers)
    try:
        curves = performance_profile(runs, measure)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out_dir = _ensure_out_dir(args)
    path = os.path.join(out_dir, f"profile_{measure}.csv")
    meta = _meta(spec)
    if measure == "wall_time":
        meta["platform_dependent"] = "wall-time ratios vary across machines"
    write_profiles_csv(curves, path, meta)
    if args.pretty:
        for curve in curves:
            at_one = curve.points[0][1] if curve.points else 0.0
            tail = curve.points[-1][1] if curve.points else 0.0
            print(f"{curve.method:8} rho(1)={at_one:.3f} rho(inf)={tail:.3f}")
    print(f"wrote {path}")
    return 0


def cmd_pareto(args) -> int:
    cfg_file = _load_config_file(args.config) if args.config else {}
    if not args.method and "methods" not in cfg_file:
        args.method = ["tt-prp"]
    spec = _experiment_spec(args, cfg_file)
    runs = run_experiment(spec, workers=args.workers)
    out_dir = _ensure_out_dir(args)
    for name in spec.problems:
        rows = export_pareto_points(runs, name)
        path = os.path.join(out_dir, f"pareto_{name}.csv")
        write_pareto_csv(rows, path, _meta(spec))
        n_conv = sum(1 for r in rows if r["status"] == STATUS_CONVERGED)
        print(f"wrote {path} ({len(rows)} rows, {n_conv} converged)")
    return 0


def cmd_check(args) -> int:
    rows = run_battery(args.filter or "")
    if not rows:
        print(f"no checks match filter {args.filter!r}", file=sys.stderr)
        return 2
    failed = 0
    for name, ok, detail in rows:
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} {name}: {detail}")
        if not ok:
            failed += 1
    if failed:
        print(f"{failed} of {len(rows)} checks failed")
        return 1
    print(f"all {len(rows)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--max-iters", type=int, default=None)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--pretty", action="store_true")


def _add_grid(parser):
    parser.add_argument(
        "--problem", action="append", help="repeatable; registry name"
    )
    parser.add_argument(
        "--method", action="append", help=f"repeatable; one of {METHODS}"
    )
    parser.add_argument("--starts", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mocg",
        description="Conjugate-gradient methods for multiobjective optimization",
    )
    parser.add_argument("--version", action="version", version=f"mocg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="registered problems")
    _add_common(p_list)
    p_list.set_defaults(func=cmd_list)

    p_solve = sub.add_parser("solve", help="one run, trace to file")
    p_solve.add_argument("problem_name")
    p_solve.add_argument(
        "--method", dest="method_single", default=None, help=f"one of {METHODS}"
    )
    p_solve.add_argument("--x0", default=None, help="comma-separated start point")
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="multi-start grid, metrics table")
    _add_grid(p_bench)
    p_bench.add_argument(
        "--validate",
        action="store_true",
        help="recheck every accepted step from scratch",
    )
    _add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_profile = sub.add_parser("profile", help="performance profile breakpoints")
    _add_grid(p_profile)
    p_profile.add_argument(
        "--measure", choices=PROFILE_MEASURES, default="jac_evals"
    )
    _add_common(p_profile)
    p_profile.set_defaults(func=cmd_profile)

    p_pareto = sub.add_parser("pareto", help="final points for frontier plots")
    _add_grid(p_pareto)
    _add_common(p_pareto)
    p_pareto.set_defaults(func=cmd_pareto)

    p_check = sub.add_parser("check", help="fast invariant battery")
    p_check.add_argument("--filter", default=None, help="substring on check names")
    _add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, UnknownProblemError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
