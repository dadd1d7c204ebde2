"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numeric divergence, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    check_gradient_fd,
    detect_ball_entry,
    estimate_lipschitz,
    sample_interior,
    verify_monotone_descent,
    verify_rate_bound,
)
from .benchmarks import (
    BENCHMARK_NAMES,
    UnknownBenchmarkError,
    default_dim,
    make_benchmark,
    published_params,
)
from .core import DimensionError, HypercubeDomain, NonFiniteError, RunConfig, ScanBudgetError, ScanStrategy
from .limitcheck import find_nonzero_witness
from .optimizer import DivergenceError, Trace, run_basin_gd, run_multistart_gd, run_plain_gd
from .traceio import MalformedTraceError, read_csv, read_trace, sidecar_path, write_trace

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

ALGORITHMS = ("basin", "plain", "multistart")

# Keys accepted in a --config JSON file; same names as the long flags.
DEFAULTS = {
    "objective": None,
    "dim": None,
    "domain": None,
    "algo": "basin",
    "t": None,
    "m": None,
    "iters": 20_000,
    "scan": "diagonal",
    "budget": None,
    "seed": 0,
    "x0": None,
    "starts": 10,
    "grad_tol": 0.0,
    "clamp": True,
    "out": None,
}


class ConfigError(ValueError):
    pass


def _floats(text, what: str) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        items = text
    elif isinstance(text, (int, float)):
        items = [text]
    else:
        items = [s for s in str(text).split(",") if s.strip()]
    try:
        values = tuple(float(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigError(f"could not parse {what} from {text!r}") from None
    if not values or not all(np.isfinite(values)):
        raise ConfigError(f"{what} needs finite comma-separated numbers, got {text!r}")
    return values


@dataclass
class ExperimentConfig:
    objective: str
    dim: int
    domain: HypercubeDomain
    algorithm: str
    run: RunConfig
    seed: int = 0
    x0: tuple[float, ...] | None = None
    n_starts: int = 10
    out: Path | None = None

    @classmethod
    def from_options(cls, opts: dict) -> ExperimentConfig:
        name = opts.get("objective")
        if not name:
            raise ConfigError("--objective is required")
        name = str(name).lower()
        if name not in BENCHMARK_NAMES:
            raise ConfigError(f"unknown objective {name!r}; choose from {', '.join(BENCHMARK_NAMES)}")
        x0 = _floats(opts["x0"], "x0") if opts.get("x0") is not None else None
        dim = opts.get("dim")
        if dim is None:
            dim = len(x0) if x0 is not None else default_dim(name)
        try:
            objective = make_benchmark(name, int(dim))
        except DimensionError as exc:
            raise ConfigError(str(exc)) from None
        dom = objective.default_domain
        if opts.get("domain") is not None:
            bounds = _floats(opts["domain"], "domain")
            if len(bounds) != 2:
                raise ConfigError("--domain takes two numbers a,b")
            try:
                dom = HypercubeDomain(bounds[0], bounds[1], objective.dim)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if x0 is not None and len(x0) != objective.dim:
            raise ConfigError(f"x0 has {len(x0)} coordinates but the objective has dimension {objective.dim}")

        algo = opts.get("algo", "basin")
        if algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algo!r}")
        params = published_params(name)
        t = params.step_size if opts.get("t") is None else float(opts["t"])
        m = params.basin_bound if opts.get("m") is None else float(opts["m"])
        if algo == "basin" and m > dom.width:
            raise ConfigError(f"basin bound m={m} exceeds the domain width {dom.width}")
        try:
            run = RunConfig(
                step_size=t,
                basin_bound=m,
                max_iterations=int(opts["iters"]),
                scan_strategy=ScanStrategy(opts["scan"]),
                lattice_point_budget=int(opts["budget"]) if opts.get("budget") is not None else 1_000_000,
                clamp_to_domain=bool(opts["clamp"]),
                stop_grad_tol=float(opts["grad_tol"]),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        starts = int(opts["starts"])
        if starts < 1:
            raise ConfigError("--starts must be at least 1")
        out = Path(opts["out"]) if opts.get("out") else None
        return cls(name, objective.dim, dom, algo, run, int(opts["seed"]), x0, starts, out)


def load_options(args: argparse.Namespace, keys) -> dict:
    """Merge built-in defaults, then the JSON config file, then explicit flags."""
    opts = {k: DEFAULTS[k] for k in keys}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                from_file = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(from_file, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(from_file)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def _run(cfg: ExperimentConfig, algorithm: str | None = None) -> Trace:
    objective = make_benchmark(cfg.objective, cfg.dim)
    algorithm = algorithm or cfg.algorithm
    run = cfg.run
    if algorithm == "basin":
        return run_basin_gd(objective, cfg.domain, run)
    if algorithm == "plain":
        x0 = cfg.x0 if cfg.x0 is not None else tuple(cfg.domain.lower().tolist())
        return run_plain_gd(objective, x0, run.step_size, run.max_iterations, run.stop_grad_tol)
    return run_multistart_gd(
        objective, cfg.domain, cfg.n_starts, run.step_size, run.max_iterations, cfg.seed, run.stop_grad_tol
    )


def _step_size_note(cfg: ExperimentConfig) -> str | None:
    objective = make_benchmark(cfg.objective, cfg.dim)
    lip = estimate_lipschitz(objective, cfg.domain, 1000, seed=0)
    if lip > 0 and cfg.run.step_size > 1.0 / lip:
        return (
            f"note: step size {cfg.run.step_size} exceeds 1/L = {1.0 / lip:.3g} "
            f"(sampled gradient Lipschitz bound {lip:.4g} over the domain)"
        )
    return None


def _summary(trace: Trace) -> str:
    last = trace.final
    return (
        f"objective={trace.objective_name} algo={trace.algorithm} iterations={len(trace)} "
        f"final_f={last.f_x_k!r} grad_norm={last.grad_norm!r} value_evals={trace.value_evals} "
        f"gradient_evals={trace.gradient_evals} termination={trace.termination.value}"
    )


RUN_KEYS = ("objective", "dim", "domain", "algo", "t", "m", "iters", "scan", "budget", "seed",
            "x0", "starts", "grad_tol", "clamp", "out")


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_options(load_options(args, RUN_KEYS))
    out = cfg.out or Path(f"trace_{cfg.objective}_{cfg.algorithm}.csv")
    note = _step_size_note(cfg)
    if note:
        print(note, file=sys.stderr)
    try:
        trace = _run(cfg)
    except DivergenceError as exc:
        if exc.trace.records:
            write_trace(exc.trace, out)
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    write_trace(trace, out)
    print(_summary(trace) + f" out={out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.trace)
    if not path.exists():
        raise OSError(f"trace file {path} not found")
    lines = []
    ok = True
    if sidecar_path(path).exists():
        trace = read_trace(path)
        bad = verify_monotone_descent(trace)
        lines.append(
            f"descent: {'PASS' if not bad else 'FAIL'} "
            f"(t={trace.config.step_size!r}, {max(0, len(trace) - 1)} steps, {len(bad)} violations)"
        )
        if bad:
            lines.append(f"descent_violations: {' '.join(map(str, bad[:20]))}")
        ok &= not bad
    else:
        trace = None
        rows = read_csv(path)
        bad = [r.k for prev, r in zip(rows, rows[1:]) if r.f > prev.f + 1e-9]
        lines.append(
            f"descent: {'PASS' if not bad else 'FAIL'} "
            f"(f column only, no sidecar; {len(rows) - 1} steps, {len(bad)} increases)"
        )
        if bad:
            lines.append(f"descent_violations: {' '.join(map(str, bad[:20]))}")
        ok &= not bad

    if args.x_star is not None:
        if trace is None:
            raise ConfigError(f"--x-star needs the point sidecar {sidecar_path(path)}")
        x_star = _floats(args.x_star, "x-star")
        if len(x_star) != len(trace.final.x_k):
            raise ConfigError("x-star dimension differs from the trace")
        r = args.r
        M = detect_ball_entry(trace, x_star, r)
        if M is None:
            lines.append(f"ball_entry: FAIL (iterates never settle within r={r!r})")
            ok = False
        else:
            lines.append(f"ball_entry: M={M} (r={r!r})")
            f_star = args.f_star
            if f_star is None:
                try:
                    f_star = make_benchmark(trace.objective_name, len(x_star)).value(x_star)
                except (UnknownBenchmarkError, DimensionError):
                    f_star = 0.0
            if M >= len(trace) - 1:
                lines.append(f"rate_bound: SKIP (ball entered at the last record, M={M})")
            else:
                report = verify_rate_bound(trace, x_star, f_star, M)
                lines.append(
                    f"rate_bound: {'PASS' if report.passed else 'FAIL'} "
                    f"(M={M}, f*={f_star!r}, checked={report.checked}, violations={len(report.violations)}, "
                    f"averaged_violations={len(report.averaged_violations)})"
                )
                for k, lhs, rhs in report.violations[:10]:
                    lines.append(f"rate_violation: k={k} lhs={lhs!r} rhs={rhs!r}")
                ok &= report.passed
    print("\n".join(lines))
    print(f"result: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_witness(args) -> int:
    name = args.objective.lower()
    if args.z is None:
        raise ConfigError("--z is required")
    z = _floats(args.z, "z")
    dim = args.dim if args.dim is not None else len(z)
    try:
        objective = make_benchmark(name, dim)
    except UnknownBenchmarkError:
        raise ConfigError(f"unknown objective {name!r}") from None
    except DimensionError as exc:
        raise ConfigError(str(exc)) from None
    if len(z) != objective.dim:
        raise ConfigError(f"z has {len(z)} coordinates but the objective has dimension {objective.dim}")
    dom = objective.default_domain
    if args.domain is not None:
        bounds = _floats(args.domain, "domain")
        if len(bounds) != 2:
            raise ConfigError("--domain takes two numbers a,b")
        try:
            dom = HypercubeDomain(bounds[0], bounds[1], objective.dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    budget = args.budget if args.budget is not None else 100_000
    outcome = find_nonzero_witness(objective, z, dom, args.levels, budget)
    if outcome.found:
        w = ",".join(repr(v) for v in outcome.witness.tolist())
        print(
            f"WitnessFound witness={w} f_gap={outcome.h_value!r} level={outcome.level} "
            f"points_checked={outcome.points_checked}"
        )
    else:
        print(f"Unknown points_checked={outcome.points_checked}")
    return EXIT_OK


def cmd_compare(args) -> int:
    opts = load_options(args, RUN_KEYS)
    cfg = ExperimentConfig.from_options(opts)
    algorithms = ["basin", "multistart"] + (["plain"] if cfg.x0 is not None else [])
    rows = []
    timings = []
    for algo in algorithms:
        start = time.perf_counter()
        try:
            trace = _run(cfg, algo)
            final = repr(trace.final.f_x_k)
            iters, ve, ge = len(trace), trace.value_evals, trace.gradient_evals
        except DivergenceError as exc:
            final, iters = "diverged", exc.iteration
            ve, ge = exc.trace.value_evals, exc.trace.gradient_evals
        timings.append((algo, time.perf_counter() - start))
        rows.append((algo, final, str(iters), str(ve), str(ge)))
    header = ("algorithm", "final_f", "iterations", "value_evals", "gradient_evals")
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    for row in [header] + rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    # wall time varies run to run, so it stays off stdout
    for algo, secs in timings:
        print(f"wall_time {algo} {secs:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_grad_check(args) -> int:
    try:
        objective = make_benchmark(args.objective, args.dim)
    except UnknownBenchmarkError:
        raise ConfigError(f"unknown objective {args.objective!r}") from None
    except DimensionError as exc:
        raise ConfigError(str(exc)) from None
    points = sample_interior(objective.default_domain, args.samples, args.seed)
    errors = [check_gradient_fd(objective, p, args.h) for p in points]
    worst = max(errors)
    passed = worst <= args.tol
    print(
        f"grad-check objective={objective.name} dim={objective.dim} samples={args.samples} "
        f"h={args.h!r} max_error={worst:.3e} tol={args.tol:.1e} {'PASS' if passed else 'FAIL'}"
    )
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--objective", help=f"one of: {', '.join(BENCHMARK_NAMES)}")
    p.add_argument("--dim", type=int)
    p.add_argument("--domain", help="override the search box as a,b")
    p.add_argument("--algo", choices=ALGORITHMS)
    p.add_argument("--t", type=float, help="step size (default: the benchmark's tuned value)")
    p.add_argument("--m", type=float, help="basin bound / scan spacing")
    p.add_argument("--iters", type=int, help="iteration budget (default 20000)")
    p.add_argument("--scan", choices=[s.value for s in ScanStrategy])
    p.add_argument("--budget", type=int, help="max points per lattice scan")
    p.add_argument("--seed", type=int)
    p.add_argument("--x0", help="start point for plain descent, comma separated")
    p.add_argument("--starts", type=int, help="number of multi-start draws (default 10)")
    p.add_argument("--grad-tol", dest="grad_tol", type=float, help="stop once |grad| <= this")
    p.add_argument("--no-clamp", dest="clamp", action="store_const", const=False,
                   help="evaluate shifted scan points even outside the box")
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--config", help="JSON file with the same keys as the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridshift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one optimizer and write a trace")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check a trace against the convergence bounds")
    p.add_argument("trace")
    p.add_argument("--x-star", dest="x_star", help="global minimizer, comma separated")
    p.add_argument("--r", type=float, default=0.5, help="ball radius for the entry index (default 0.5)")
    p.add_argument("--f-star", dest="f_star", type=float,
                   help="optimal value (default: objective value at x-star)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witness", help="search for a point beating f(z)")
    p.add_argument("--objective", required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--z", required=True)
    p.add_argument("--domain")
    p.add_argument("--budget", type=int, help="max probe points (default 100000)")
    p.add_argument("--levels", type=int, default=30)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("compare", help="grid-shift method vs. multi-start descent")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("grad-check", help="analytic gradient vs. central differences")
    p.add_argument("--objective", required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=1e-6)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_grad_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScanBudgetError, UnknownBenchmarkError, DimensionError, MalformedTraceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, NonFiniteError) as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
