"""Exit criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the summary section lists
one PASS/FAIL line per criterion.
"""

import time

import numpy as np
import pytest

from gridshift import (
    BENCHMARK_NAMES,
    RunConfig,
    Termination,
    check_gradient_fd,
    detect_ball_entry,
    find_nonzero_witness,
    make_benchmark,
    published_params,
    run_basin_gd,
    scan_argmin,
    verify_monotone_descent,
    verify_rate_bound,
)
from gridshift.analysis import sample_interior
from gridshift.cli import main

from conftest import make_objective

# Reproduction runs: published step size and basin bound, per-benchmark budget
# and the tolerance each must reach.
REPRODUCTION = {
    "sphere": dict(dim=20, scan="diagonal", iters=5_000, f_tol=1e-3),
    "rastrigin": dict(dim=20, scan="diagonal", iters=2_000, f_tol=1e-2),
    "rosenbrock": dict(dim=20, scan="diagonal", iters=1_000, f_tol=0.0),
    "ackley": dict(dim=2, scan="lattice", iters=2_000, f_tol=1e-3),
    "beale": dict(dim=2, scan="lattice", iters=30_000, f_tol=1e-3),
    "booth": dict(dim=2, scan="lattice", iters=20_000, f_tol=1e-3),
}
MAX_BUDGET = 100_000
WITNESS_BUDGET = 100_000
WITNESS_DIM = 2


def reproduction_run(name):
    setup = REPRODUCTION[name]
    obj = make_benchmark(name, setup["dim"])
    params = published_params(name)
    cfg = RunConfig(params.step_size, params.basin_bound, setup["iters"], setup["scan"])
    return run_basin_gd(obj, obj.default_domain, cfg)


@pytest.fixture(scope="module")
def reproductions():
    start = time.perf_counter()
    traces = {name: reproduction_run(name) for name in REPRODUCTION}
    return traces, time.perf_counter() - start


def test_benchmark_optima(criterion):
    start = time.perf_counter()
    expected = {
        "rastrigin": [0.0] * 20,
        "sphere": [0.0] * 20,
        "rosenbrock": [1.0] * 20,
        "ackley": [0.0, 0.0],
        "beale": [3.0, 0.5],
        "booth": [1.0, 3.0],
    }
    worst = 0.0
    for name, x_star in expected.items():
        obj = make_benchmark(name, len(x_star))
        assert list(obj.known_optimum) == x_star
        worst = max(worst, abs(obj.value(x_star)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 1.0
    criterion("benchmark optima", ok, f"max |f(x*)| = {worst:.1e} (tol 1e-12), {elapsed:.3f}s (< 1s)")
    assert ok


def test_gradient_oracle(criterion):
    start = time.perf_counter()
    worst = {}
    for name in BENCHMARK_NAMES:
        obj = make_benchmark(name)
        points = sample_interior(obj.default_domain, 100, seed=2024)
        worst[name] = max(check_gradient_fd(obj, p, 1e-6) for p in points)
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-6 and elapsed < 5.0
    detail = ", ".join(f"{n} {e:.1e}" for n, e in worst.items())
    criterion("gradient oracle", ok, f"max rel err {detail} (tol 1e-6), {elapsed:.2f}s (< 5s)")
    assert ok


def test_reproduction_at_published_parameters(reproductions, criterion):
    traces, elapsed = reproductions
    failures = []
    for name, setup in REPRODUCTION.items():
        tr = traces[name]
        assert setup["iters"] <= MAX_BUDGET
        if tr.final.f_x_k > setup["f_tol"]:
            failures.append(f"{name} f={tr.final.f_x_k:.2e}")
    ras = traces["rastrigin"].final
    if np.linalg.norm(ras.x_k) > 0.1:
        failures.append(f"rastrigin |x|={np.linalg.norm(ras.x_k):.2e}")
    ros = traces["rosenbrock"]
    if not (ros.records[0].z_k == (1.0,) * 20 and ros.final.f_x_k == 0.0
            and ros.termination is Termination.GRADIENT_TOL_REACHED):
        failures.append("rosenbrock did not stop on the exact grid hit")
    if elapsed > 120:
        failures.append(f"runtime {elapsed:.1f}s")
    finals = ", ".join(f"{n} {traces[n].final.f_x_k:.1e}@{len(traces[n])}" for n in REPRODUCTION)
    criterion("published-parameter reproduction", not failures,
              f"final f@iters: {finals}; {elapsed:.1f}s (<= 120s) {'; '.join(failures)}")
    assert not failures


def test_descent_inequality(reproductions, criterion):
    traces, _ = reproductions
    violations = {name: verify_monotone_descent(tr) for name, tr in traces.items()}
    ok = not any(violations.values())
    criterion("descent inequality", ok,
              ", ".join(f"{n} {len(v)} violations/{len(traces[n]) - 1} steps" for n, v in violations.items()))
    assert ok


def test_rate_bound(criterion):
    start = time.perf_counter()
    details = []
    ok = True
    for name in ("sphere", "booth"):
        tr = reproduction_run(name)
        obj = make_benchmark(name, REPRODUCTION[name]["dim"])
        M = detect_ball_entry(tr, obj.known_optimum, 0.5)
        if M is None:
            ok = False
            details.append(f"{name}: ball never entered")
            continue
        report = verify_rate_bound(tr, obj.known_optimum, obj.known_optimum_value, M)
        ok &= report.passed
        details.append(f"{name} M={M} checked={report.checked} violations={len(report.violations)}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10.0
    criterion("rate bound", ok, f"{'; '.join(details)}; {elapsed:.2f}s (< 10s)")
    assert ok


def test_scan_oracle_equivalence(criterion):
    rng = np.random.default_rng(7)
    mismatches = 0
    ties = 0
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        n = int(rng.integers(1, 80))
        pts = rng.uniform(-5, 5, size=(n, d))
        if n > 1:
            # duplicate the true minimizer at a later index
            w = rng.normal(size=d)
            fn = lambda x, w=w: float(np.round(np.sum(w * x**2), 0))
            values = [fn(p) for p in pts]
            first = int(np.argmin(values))
            pts[int(rng.integers(first, n))] = pts[first]
        else:
            fn = lambda x: float(np.sum(x))
        obj = make_objective("random", d, fn, lambda x: np.zeros_like(x))
        res = scan_argmin(pts, obj)
        best, best_val = 0, fn(pts[0])
        for j in range(1, n):
            v = fn(pts[j])
            if v < best_val:
                best, best_val = j, v
        ties += sum(fn(p) == best_val for p in pts) > 1
        mismatches += (res.best_index, res.best_value) != (best, best_val)
    criterion("scan oracle equivalence", mismatches == 0,
              f"1000 point sets, {ties} with tied minima, {mismatches} mismatches")
    assert mismatches == 0 and ties > 500


def perturbed_points(obj, rng, count):
    dom = obj.default_domain
    x_star = np.array(obj.known_optimum)
    out = []
    while len(out) < count:
        z = np.clip(x_star + rng.uniform(-0.2, 0.2, obj.dim) * dom.width, dom.a, dom.b)
        if obj.value_fn(z) >= obj.known_optimum_value + 0.1:
            out.append(z)
    return out


def test_witness_asymmetry(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    found = {}
    unknown_ok = True
    for name in BENCHMARK_NAMES:
        obj = make_benchmark(name, WITNESS_DIM)
        hits = 0
        for z in perturbed_points(obj, rng, 10):
            out = find_nonzero_witness(obj, z, obj.default_domain, 30, WITNESS_BUDGET)
            hits += out.found and obj.value(out.witness) < obj.value(z)
        found[name] = hits
        for budget in (1, 1_000, WITNESS_BUDGET):
            out = find_nonzero_witness(obj, obj.known_optimum, obj.default_domain, 30, budget)
            unknown_ok &= not out.found
    elapsed = time.perf_counter() - start
    ok = all(h == 10 for h in found.values()) and unknown_ok and elapsed < 30
    criterion("witness asymmetry", ok,
              f"witnesses {', '.join(f'{n} {h}/10' for n, h in found.items())}; "
              f"Unknown at optima: {unknown_ok}; {elapsed:.1f}s (< 30s)")
    assert ok


def test_determinism(tmp_path, capsys, criterion):
    commands = {
        "basin": ["run", "--objective", "rastrigin", "--dim", "5", "--iters", "500"],
        "lattice": ["run", "--objective", "beale", "--scan", "lattice", "--iters", "500"],
        "plain": ["run", "--objective", "booth", "--algo", "plain", "--x0", "0,0", "--iters", "500"],
        "multistart": ["run", "--objective", "rastrigin", "--dim", "2", "--algo", "multistart",
                       "--starts", "5", "--seed", "42", "--iters", "500"],
    }
    differing = []
    for label, argv in commands.items():
        blobs = []
        for attempt in range(2):
            out = tmp_path / f"{label}_{attempt}.csv"
            assert main(argv + ["--out", str(out)]) == 0
            blobs.append((out.read_bytes(), out.with_name(out.name + ".json").read_bytes()))
        if blobs[0] != blobs[1]:
            differing.append(label)
    capsys.readouterr()
    stdout_cmds = {
        "compare": ["compare", "--objective", "rastrigin", "--dim", "2", "--starts", "3", "--seed", "1",
                    "--iters", "300"],
        "witness": ["witness", "--objective", "rastrigin", "--dim", "2", "--z", "1,1"],
        "verify": ["verify", str(tmp_path / "plain_0.csv"), "--x-star", "1,3"],
    }
    for label, argv in stdout_cmds.items():
        outs = []
        for _ in range(2):
            main(argv)
            outs.append(capsys.readouterr().out)
        if outs[0] != outs[1]:
            differing.append(label)
    ok = not differing
    criterion("determinism", ok,
              f"{len(commands)} trace-writing runs and {len(stdout_cmds)} report commands repeated; "
              f"differing: {differing or 'none'}")
    assert ok
