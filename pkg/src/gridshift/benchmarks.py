"""Benchmark objectives with analytic gradients.

Every raw function here works on the last axis, so the same code evaluates a
single point of shape (d,) or a batch of shape (n, d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DimensionError, EvalCounters, HypercubeDomain, as_point

RASTRIGIN_A = 10.0
EXPERIMENT_DIM = 20


class UnknownBenchmarkError(KeyError):
    pass


@dataclass(eq=False)
class ObjectiveHandle:
    """A named differentiable function plus its metadata.

    `value_fn` maps a point of shape (d,) to a float. If `vectorized` is set,
    it must also map an (n, d) batch to an (n,) array, which lets scans avoid
    a Python loop. `gradient_fn` maps a (d,) point to a (d,) gradient.
    """

    name: str
    dim: int
    value_fn: Callable[[np.ndarray], float | np.ndarray]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    default_domain: HypercubeDomain
    known_optimum: tuple[float, ...] | None = None
    known_optimum_value: float | None = None
    vectorized: bool = False
    counters: EvalCounters = field(default_factory=EvalCounters)

    def __post_init__(self):
        if self.default_domain.d != self.dim:
            raise DimensionError("default domain dimension differs from objective dimension")

    def value(self, x) -> float:
        p = as_point(x, self.dim)
        self.counters.add_values(1)
        return float(self.value_fn(p))

    def values(self, points) -> np.ndarray:
        """Evaluate a batch of points; raises on NaN results."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionError(f"expected an (n, {self.dim}) batch, got shape {pts.shape}")
        if self.vectorized:
            out = np.asarray(self.value_fn(pts), dtype=np.float64).reshape(len(pts))
        else:
            out = np.fromiter((self.value_fn(p) for p in pts), dtype=np.float64, count=len(pts))
        self.counters.add_values(len(pts))
        return out

    def gradient(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        self.counters.add_gradients(1)
        g = np.asarray(self.gradient_fn(p), dtype=np.float64)
        if g.shape != (self.dim,):
            raise DimensionError(f"gradient has shape {g.shape}, expected ({self.dim},)")
        return g


def benchmark_value(handle: ObjectiveHandle, x) -> float:
    return handle.value(x)


def benchmark_gradient(handle: ObjectiveHandle, x) -> np.ndarray:
    return handle.gradient(x)


# --- raw formulas ---


def rastrigin(x):
    x = np.asarray(x)
    n = x.shape[-1]
    return RASTRIGIN_A * n + np.sum(x**2 - RASTRIGIN_A * np.cos(2 * np.pi * x), axis=-1)


def rastrigin_grad(x):
    return 2 * x + 2 * np.pi * RASTRIGIN_A * np.sin(2 * np.pi * x)


def ackley(x):
    x = np.asarray(x)
    u, v = x[..., 0], x[..., 1]
    r = np.sqrt(0.5 * (u**2 + v**2))
    return (
        -20 * np.exp(-0.2 * r)
        - np.exp(0.5 * (np.cos(2 * np.pi * u) + np.cos(2 * np.pi * v)))
        + np.e
        + 20
    )


def ackley_grad(x):
    u, v = x
    r = np.sqrt(0.5 * (u**2 + v**2))
    if r == 0.0:
        # cone tip: not differentiable, but it is the global minimizer
        return np.zeros(2)
    radial = 2 * np.exp(-0.2 * r) / r
    wave = np.pi * np.exp(0.5 * (np.cos(2 * np.pi * u) + np.cos(2 * np.pi * v)))
    return np.array([radial * u + wave * np.sin(2 * np.pi * u), radial * v + wave * np.sin(2 * np.pi * v)])


def sphere(x):
    return np.sum(np.asarray(x) ** 2, axis=-1)


def sphere_grad(x):
    return 2 * x


def rosenbrock(x):
    x = np.asarray(x)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100 * (tail - head**2) ** 2 + (1 - head) ** 2, axis=-1)


def rosenbrock_grad(x):
    head, tail = x[:-1], x[1:]
    g = np.zeros_like(x)
    inner = tail - head**2
    g[:-1] += -400 * head * inner - 2 * (1 - head)
    g[1:] += 200 * inner
    return g


def beale(x):
    x = np.asarray(x)
    u, v = x[..., 0], x[..., 1]
    return (1.5 - u + u * v) ** 2 + (2.25 - u + u * v**2) ** 2 + (2.625 - u + u * v**3) ** 2


def beale_grad(x):
    u, v = x
    r1 = 1.5 - u + u * v
    r2 = 2.25 - u + u * v**2
    r3 = 2.625 - u + u * v**3
    du = 2 * r1 * (v - 1) + 2 * r2 * (v**2 - 1) + 2 * r3 * (v**3 - 1)
    dv = 2 * r1 * u + 4 * r2 * u * v + 6 * r3 * u * v**2
    return np.array([du, dv])


def booth(x):
    x = np.asarray(x)
    u, v = x[..., 0], x[..., 1]
    return (u + 2 * v - 7) ** 2 + (2 * u + v - 5) ** 2


def booth_grad(x):
    u, v = x
    r1 = u + 2 * v - 7
    r2 = 2 * u + v - 5
    return np.array([2 * r1 + 4 * r2, 4 * r1 + 2 * r2])


@dataclass(frozen=True)
class BenchmarkParams:
    step_size: float
    basin_bound: float


@dataclass(frozen=True)
class _Entry:
    value: Callable
    gradient: Callable
    bounds: tuple[float, float]
    optimum: Callable[[int], tuple[float, ...]]
    fixed_dim: int | None = None
    min_dim: int = 1


# Sphere and Rosenbrock are unbounded in the usual tables; they get [-5, 5]^d.
_REGISTRY: dict[str, _Entry] = {
    "rastrigin": _Entry(rastrigin, rastrigin_grad, (-5.12, 5.12), lambda d: (0.0,) * d),
    "ackley": _Entry(ackley, ackley_grad, (-5.0, 5.0), lambda d: (0.0, 0.0), fixed_dim=2),
    "sphere": _Entry(sphere, sphere_grad, (-5.0, 5.0), lambda d: (0.0,) * d),
    "rosenbrock": _Entry(rosenbrock, rosenbrock_grad, (-5.0, 5.0), lambda d: (1.0,) * d, min_dim=2),
    "beale": _Entry(beale, beale_grad, (-4.5, 4.5), lambda d: (3.0, 0.5), fixed_dim=2),
    "booth": _Entry(booth, booth_grad, (-10.0, 10.0), lambda d: (1.0, 3.0), fixed_dim=2),
}

_PUBLISHED_PARAMS: dict[str, BenchmarkParams] = {
    "rastrigin": BenchmarkParams(0.0001, 0.5),
    "ackley": BenchmarkParams(0.0001, 0.1),
    "sphere": BenchmarkParams(0.001, 0.3),
    "rosenbrock": BenchmarkParams(0.001, 0.5),
    "beale": BenchmarkParams(0.0005, 0.3),
    "booth": BenchmarkParams(0.005, 0.3),
}

BENCHMARK_NAMES = tuple(_REGISTRY)


def _entry(name: str) -> _Entry:
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise UnknownBenchmarkError(
            f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARK_NAMES)}"
        ) from None


def default_dim(name: str) -> int:
    """Dimension used in the reported experiments: 2 for the planar functions, 20 otherwise."""
    entry = _entry(name)
    return entry.fixed_dim or EXPERIMENT_DIM


def make_benchmark(name: str, dim: int | None = None) -> ObjectiveHandle:
    entry = _entry(name)
    if dim is None:
        dim = default_dim(name)
    if int(dim) != dim:
        raise DimensionError(f"dimension must be an integer, got {dim}")
    dim = int(dim)
    if entry.fixed_dim is not None and dim != entry.fixed_dim:
        raise DimensionError(f"{name} is defined only in dimension {entry.fixed_dim}, got {dim}")
    if dim < entry.min_dim:
        raise DimensionError(f"{name} needs dimension >= {entry.min_dim}, got {dim}")
    a, b = entry.bounds
    return ObjectiveHandle(
        name=name.lower(),
        dim=dim,
        value_fn=entry.value,
        gradient_fn=entry.gradient,
        default_domain=HypercubeDomain(a, b, dim),
        known_optimum=entry.optimum(dim),
        known_optimum_value=0.0,
        vectorized=True,
    )


def published_params(name: str) -> BenchmarkParams:
    _entry(name)
    return _PUBLISHED_PARAMS[name.lower()]

