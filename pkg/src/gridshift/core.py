"""Shared value types and box geometry."""

from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np

Point = np.ndarray


class DimensionError(ValueError):
    """A point's length does not match the domain or objective dimension."""


class NonFiniteError(ArithmeticError):
    """A NaN or infinity showed up where a finite real was required."""


class ScanBudgetError(ValueError):
    """A full lattice scan would need more points than allowed."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"lattice scan needs {required} points but the budget is {budget}; "
            "use the diagonal scan strategy instead"
        )


def as_point(x: Sequence[float] | np.ndarray, dim: int | None = None) -> Point:
    """Return `x` as a fresh finite float64 vector, checking its length."""
    p = np.array(x, dtype=np.float64)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"expected a non-empty 1-D point, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise NonFiniteError(f"point has non-finite coordinates: {p.tolist()}")
    return p


@dataclass(frozen=True)
class HypercubeDomain:
    """The closed box [a, b]^d, identical bounds on every axis."""

    a: float
    b: float
    d: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("domain bounds must be finite")
        if not self.a < self.b:
            raise ValueError(f"domain needs a < b, got a={self.a}, b={self.b}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"domain dimension must be a positive integer, got {self.d}")

    @property
    def width(self) -> float:
        return self.b - self.a

    def lower(self) -> Point:
        return np.full(self.d, self.a, dtype=np.float64)

    def upper(self) -> Point:
        return np.full(self.d, self.b, dtype=np.float64)


def clamp_to_domain(p, dom: HypercubeDomain) -> Point:
    """Project onto the box coordinate-wise.

    Also accepts an (n, d) array of points and clamps every row.
    """
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape[-1] != dom.d:
        raise DimensionError(f"expected dimension {dom.d}, got {arr.shape[-1]}")
    if np.isnan(arr).any():
        raise NonFiniteError("cannot clamp a point with NaN coordinates")
    return np.clip(arr, dom.a, dom.b)


def contains(dom: HypercubeDomain, p) -> bool:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (dom.d,):
        raise DimensionError(f"expected dimension {dom.d}, got shape {arr.shape}")
    return bool(np.all((arr >= dom.a) & (arr <= dom.b)))


class EvalCounters:
    """Running count of objective and gradient evaluations.

    Updates take a lock, so workers evaluating a scan in parallel can share
    one instance.
    """

    def __init__(self, value_evals: int = 0, gradient_evals: int = 0):
        self.value_evals = value_evals
        self.gradient_evals = gradient_evals
        self._lock = threading.Lock()

    def add_values(self, n: int = 1) -> None:
        with self._lock:
            self.value_evals += n

    def add_gradients(self, n: int = 1) -> None:
        with self._lock:
            self.gradient_evals += n

    def snapshot(self) -> tuple[int, int]:
        with self._lock:
            return self.value_evals, self.gradient_evals

    def __repr__(self):
        return f"EvalCounters(value_evals={self.value_evals}, gradient_evals={self.gradient_evals})"


class ScanStrategy(str, Enum):
    DIAGONAL = "diagonal"
    LATTICE = "lattice"


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters for one optimizer run.

    `basin_bound` is only meaningful for the grid-shift algorithm and may be
    left as None for the plain and multi-start baselines.
    """

    step_size: float
    basin_bound: float | None = None
    max_iterations: int = 20_000
    scan_strategy: ScanStrategy = ScanStrategy.DIAGONAL
    lattice_point_budget: int = 1_000_000
    clamp_to_domain: bool = True
    stop_grad_tol: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "scan_strategy", ScanStrategy(self.scan_strategy))
        if not (math.isfinite(self.step_size) and self.step_size > 0):
            raise ValueError(f"step size must be positive, got {self.step_size}")
        if self.basin_bound is not None and not (
            math.isfinite(self.basin_bound) and self.basin_bound > 0
        ):
            raise ValueError(f"basin bound must be positive, got {self.basin_bound}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if int(self.lattice_point_budget) != self.lattice_point_budget or self.lattice_point_budget < 1:
            raise ValueError("lattice_point_budget must be a positive integer")
        if not self.stop_grad_tol >= 0:
            raise ValueError("stop_grad_tol must be nonnegative")

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["scan_strategy"] = self.scan_strategy.value
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        return cls(**data)
