"""Candidate point sets spaced by the basin bound, and argmin over them."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .benchmarks import ObjectiveHandle
from .core import HypercubeDomain, NonFiniteError, Point, ScanBudgetError, as_point

# (b - a) / m is floored, but a quotient like 9 / 0.3 that is an integer in
# exact arithmetic may land a hair below it in floating point.
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class ScanResult:
    best_index: int
    best_point: Point
    best_value: float
    points_evaluated: int


def steps_per_axis(dom: HypercubeDomain, m: float) -> int:
    """Number of spacing-`m` steps that fit in one side of the box."""
    if not m > 0:
        raise ValueError(f"spacing must be positive, got {m}")
    return int(math.floor(dom.width / m + _FLOOR_SLACK))


def diagonal_points(dom: HypercubeDomain, origin, m: float) -> np.ndarray:
    """Points origin + j*m*(1, ..., 1) for j = 0 .. floor((b - a) / m).

    Returned as an (n, d) array in index order.
    """
    o = as_point(origin, dom.d)
    j = np.arange(steps_per_axis(dom, m) + 1, dtype=np.float64)
    return o[None, :] + (j * m)[:, None]


def lattice_size(dom: HypercubeDomain, m: float) -> int:
    return (steps_per_axis(dom, m) + 1) ** dom.d


def lattice_points(dom: HypercubeDomain, origin, m: float, budget: int) -> np.ndarray:
    """Full Cartesian grid of spacing `m` anchored at `origin`.

    Rows are in lexicographic order of the axis indices with the last axis
    varying fastest.
    """
    o = as_point(origin, dom.d)
    n_axis = steps_per_axis(dom, m) + 1
    required = n_axis**dom.d
    if required > budget:
        raise ScanBudgetError(required, budget)
    offsets = np.arange(n_axis, dtype=np.float64) * m
    axes = [o[i] + offsets for i in range(dom.d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in mesh], axis=1)


def scan_argmin(points, objective: ObjectiveHandle, workers: int | None = None) -> ScanResult:
    """Pick the point with the lowest objective value, first index on ties.

    With `workers` > 1 the batch is split into contiguous chunks evaluated on
    a thread pool; chunk results are reassembled in order, so the selected
    index never depends on scheduling.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None] if objective.dim == 1 else pts[None, :]
    if len(pts) == 0:
        raise ValueError("cannot take the argmin of an empty point set")

    if workers is not None and workers > 1 and len(pts) > 1:
        chunks = np.array_split(pts, min(workers, len(pts)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.concatenate(list(pool.map(objective.values, chunks)))
    else:
        values = objective.values(pts)

    bad = np.isnan(values)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise NonFiniteError(f"objective is NaN at scan point {idx}: {pts[idx].tolist()}")
    best = int(np.argmin(values))
    return ScanResult(best, pts[best].copy(), float(values[best]), len(pts))
