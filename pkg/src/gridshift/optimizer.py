"""Grid-shift gradient descent and the gradient descent baselines."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .benchmarks import ObjectiveHandle
from .core import (
    DimensionError,
    HypercubeDomain,
    NonFiniteError,
    Point,
    RunConfig,
    ScanStrategy,
    as_point,
    clamp_to_domain,
)
from .scan import diagonal_points, lattice_points, scan_argmin


class Termination(str, Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    GRADIENT_TOL_REACHED = "gradient_tol_reached"


@dataclass(frozen=True)
class IterateRecord:
    """State after iteration k.

    `z_k` is the point the gradient step starts from (the scan argmin for the
    grid-shift method, the previous iterate for plain descent) and `x_k` the
    reported iterate. `grad_norm` is the norm of the gradient at `z_k`.
    `value_evals_cum` counts objective evaluations since the run started.
    """

    k: int
    z_k: tuple[float, ...]
    x_k: tuple[float, ...]
    f_x_k: float
    f_z_k: float
    grad_norm: float
    scan_best_index: int
    value_evals_cum: int


@dataclass
class Trace:
    records: list[IterateRecord]
    config: RunConfig
    objective_name: str
    termination: Termination
    algorithm: str = "basin"
    value_evals: int = 0
    gradient_evals: int = 0

    def __len__(self):
        return len(self.records)

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]

    def f_values(self) -> np.ndarray:
        return np.array([r.f_x_k for r in self.records])

    def x_array(self) -> np.ndarray:
        return np.array([r.x_k for r in self.records])


class DivergenceError(ArithmeticError):
    """A run produced a non-finite value or gradient.

    `trace` holds every record completed before the failure.
    """

    def __init__(self, message: str, iteration: int, trace: Trace):
        super().__init__(f"{message} at iteration {iteration}")
        self.iteration = iteration
        self.trace = trace


def _step(objective: ObjectiveHandle, z: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    g = objective.gradient(z)
    if not np.all(np.isfinite(g)):
        raise NonFiniteError(f"non-finite gradient at {z.tolist()}")
    with np.errstate(over="ignore", invalid="ignore"):
        x = z - t * g
    return x, g


def gd_step(objective: ObjectiveHandle, z, t: float) -> Point:
    """One gradient step z - t * grad f(z)."""
    if not t > 0:
        raise ValueError(f"step size must be positive, got {t}")
    x, _ = _step(objective, as_point(z, objective.dim), t)
    return x


def _tup(p: np.ndarray) -> tuple[float, ...]:
    return tuple(p.tolist())


class _Recorder:
    def __init__(self, objective: ObjectiveHandle, config: RunConfig, algorithm: str):
        self.objective = objective
        self.config = config
        self.algorithm = algorithm
        self.records: list[IterateRecord] = []
        self.v0, self.g0 = objective.counters.snapshot()

    def add(self, z, x, f_x, f_z, grad_norm, scan_index):
        v, _ = self.objective.counters.snapshot()
        self.records.append(
            IterateRecord(
                k=len(self.records),
                z_k=_tup(z),
                x_k=_tup(x),
                f_x_k=f_x,
                f_z_k=f_z,
                grad_norm=grad_norm,
                scan_best_index=scan_index,
                value_evals_cum=v - self.v0,
            )
        )

    def trace(self, termination: Termination) -> Trace:
        v, g = self.objective.counters.snapshot()
        return Trace(
            records=list(self.records),
            config=self.config,
            objective_name=self.objective.name,
            termination=termination,
            algorithm=self.algorithm,
            value_evals=v - self.v0,
            gradient_evals=g - self.g0,
        )

    def diverged(self, message: str) -> DivergenceError:
        return DivergenceError(message, len(self.records), self.trace(Termination.BUDGET_EXHAUSTED))


def _finite_value(objective: ObjectiveHandle, x: np.ndarray) -> float:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"iterate has non-finite coordinates: {x.tolist()}")
    with np.errstate(over="ignore", invalid="ignore"):
        f = objective.value(x)
    if not np.isfinite(f):
        raise NonFiniteError(f"objective value is {f} at {x.tolist()}")
    return f


def run_basin_gd(
    objective: ObjectiveHandle,
    dom: HypercubeDomain,
    config: RunConfig,
    workers: int | None = None,
) -> Trace:
    """Grid-shift gradient descent.

    Iteration 0 scans the candidate set anchored at the lower corner and takes
    its argmin as both z_0 and x_0. Each later iteration moves the anchor by
    -t * grad f(z_{k-1}), rescans, takes the argmin z_k and steps to
    x_k = z_k - t * grad f(z_k). Stops after `config.max_iterations` records
    or once the gradient norm at z_k drops to `config.stop_grad_tol`.
    """
    if objective.dim != dom.d:
        raise DimensionError(f"objective has dimension {objective.dim}, domain {dom.d}")
    m = config.basin_bound
    if m is None:
        raise ValueError("the grid-shift method needs a basin bound")
    if m > dom.width:
        warnings.warn(
            f"basin bound {m} exceeds the domain width {dom.width}; the scan is a single point",
            RuntimeWarning,
            stacklevel=2,
        )
    t = config.step_size

    def candidates(origin):
        if config.scan_strategy is ScanStrategy.LATTICE:
            pts = lattice_points(dom, origin, m, config.lattice_point_budget)
        else:
            pts = diagonal_points(dom, origin, m)
        return clamp_to_domain(pts, dom) if config.clamp_to_domain else pts

    rec = _Recorder(objective, config, "basin")
    origin = dom.lower()
    try:
        scan = scan_argmin(candidates(origin), objective, workers)
        z = scan.best_point
        g = objective.gradient(z)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("non-finite gradient")
    except NonFiniteError as exc:
        raise rec.diverged(str(exc)) from exc
    gnorm = float(np.linalg.norm(g))
    rec.add(z, z, scan.best_value, scan.best_value, gnorm, scan.best_index)

    for _ in range(1, config.max_iterations):
        if gnorm <= config.stop_grad_tol:
            return rec.trace(Termination.GRADIENT_TOL_REACHED)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                origin = origin - t * g
            if not np.all(np.isfinite(origin)):
                raise NonFiniteError("scan origin left the reals")
            scan = scan_argmin(candidates(origin), objective, workers)
            z = scan.best_point
            x, g = _step(objective, z, t)
            f_x = _finite_value(objective, x)
        except NonFiniteError as exc:
            raise rec.diverged(str(exc)) from exc
        gnorm = float(np.linalg.norm(g))
        rec.add(z, x, f_x, scan.best_value, gnorm, scan.best_index)

    if gnorm <= config.stop_grad_tol:
        return rec.trace(Termination.GRADIENT_TOL_REACHED)
    return rec.trace(Termination.BUDGET_EXHAUSTED)


def run_plain_gd(
    objective: ObjectiveHandle,
    x0,
    t: float,
    iters: int,
    stop_grad_tol: float = 0.0,
) -> Trace:
    """Fixed-step gradient descent from `x0`; record k holds the k-th iterate."""
    config = RunConfig(step_size=t, max_iterations=iters, stop_grad_tol=stop_grad_tol)
    rec = _Recorder(objective, config, "plain")
    x = as_point(x0, objective.dim)
    try:
        f_x = _finite_value(objective, x)
        g = objective.gradient(x)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("non-finite gradient")
    except NonFiniteError as exc:
        raise rec.diverged(str(exc)) from exc
    gnorm = float(np.linalg.norm(g))
    rec.add(x, x, f_x, f_x, gnorm, 0)

    for _ in range(1, iters):
        if gnorm <= stop_grad_tol:
            return rec.trace(Termination.GRADIENT_TOL_REACHED)
        z, f_z, g_z = x, f_x, gnorm
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                x = z - t * g
            f_x = _finite_value(objective, x)
            g = objective.gradient(x)
            if not np.all(np.isfinite(g)):
                raise NonFiniteError(f"non-finite gradient at {x.tolist()}")
        except NonFiniteError as exc:
            raise rec.diverged(str(exc)) from exc
        gnorm = float(np.linalg.norm(g))
        rec.add(z, x, f_x, f_z, g_z, 0)

    if gnorm <= stop_grad_tol:
        return rec.trace(Termination.GRADIENT_TOL_REACHED)
    return rec.trace(Termination.BUDGET_EXHAUSTED)


def draw_starts(dom: HypercubeDomain, n_starts: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(dom.a, dom.b, size=(n_starts, dom.d))


def run_multistart_gd(
    objective: ObjectiveHandle,
    dom: HypercubeDomain,
    n_starts: int,
    t: float,
    iters: int,
    seed: int,
    stop_grad_tol: float = 0.0,
) -> Trace:
    """Plain descent from `n_starts` uniform draws; returns the best run.

    "Best" is the lowest final value, first start on ties. The returned
    trace's evaluation totals cover all starts.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    v0, g0 = objective.counters.snapshot()
    best: Trace | None = None
    for x0 in draw_starts(dom, n_starts, seed):
        tr = run_plain_gd(objective, x0, t, iters, stop_grad_tol)
        if best is None or tr.final.f_x_k < best.final.f_x_k:
            best = tr
    v, g = objective.counters.snapshot()
    best.algorithm = "multistart"
    best.value_evals = v - v0
    best.gradient_evals = g - g0
    return best
