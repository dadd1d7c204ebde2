"""One-sided search for a certificate that a point is not a global minimizer.

For a candidate z, h_z(x) = min(0, f(x) - f(z)) vanishes everywhere exactly
when z is a global minimizer. Any x with h_z(x) < 0 is a finite, re-checkable
proof that z is not global; the absence of such an x after finitely many
probes proves nothing, so the search can only ever answer "found" or
"unknown".
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .benchmarks import ObjectiveHandle
from .core import HypercubeDomain, Point, as_point

WITNESS_THRESHOLD = -1e-12
_CHUNK = 8192


class WitnessStatus(str, Enum):
    WITNESS_FOUND = "WitnessFound"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class WitnessOutcome:
    status: WitnessStatus
    witness: Point | None
    h_value: float | None
    points_checked: int
    level: int | None = None

    @property
    def found(self) -> bool:
        return self.status is WitnessStatus.WITNESS_FOUND


def h_z(objective: ObjectiveHandle, z, x) -> float:
    fz = objective.value(as_point(z, objective.dim))
    fx = objective.value(as_point(x, objective.dim))
    # zero wherever x does no better than z, negative where x beats z
    return min(0.0, fx - fz)


def _level_indices(n: int, d: int, start: int, stop: int) -> np.ndarray:
    """Axis indices of flat positions [start, stop) in a grid of n^d, last axis fastest."""
    flat = np.arange(start, stop, dtype=np.int64)
    idx = np.empty((flat.size, d), dtype=np.int64)
    for axis in range(d - 1, -1, -1):
        idx[:, axis] = flat % n
        flat //= n
    return idx


def dyadic_points(
    dom: HypercubeDomain, level: int, start: int, stop: int
) -> tuple[np.ndarray, np.ndarray]:
    """Rows [start, stop) of the level-`level` dyadic lattice over `dom`, with their axis indices.

    Above level 1 this includes points already present at coarser levels
    (all indices even); callers filter those out.
    """
    n = 2**level + 1
    idx = _level_indices(n, dom.d, start, stop)
    spacing = dom.width / 2**level
    return dom.a + idx * spacing, idx


def find_nonzero_witness(
    objective: ObjectiveHandle,
    z,
    dom: HypercubeDomain,
    levels: int,
    budget: int,
) -> WitnessOutcome:
    """Probe successively finer dyadic lattices for a point where h_z < -1e-12.

    Level l has spacing (b - a) / 2^l; points seen at a coarser level are not
    probed again. Enumeration order is fixed, so a larger budget finds the
    same first witness.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    zp = as_point(z, objective.dim)
    fz = objective.value(zp)
    checked = 0
    for level in range(1, levels + 1):
        total = (2**level + 1) ** dom.d
        start = 0
        while start < total:
            if checked >= budget:
                return WitnessOutcome(WitnessStatus.UNKNOWN, None, None, checked)
            stop = min(total, start + _CHUNK)
            pts, idx = dyadic_points(dom, level, start, stop)
            start = stop
            if level > 1:
                pts = pts[np.any(idx % 2 == 1, axis=1)]
            pts = pts[: budget - checked]
            if len(pts) == 0:
                continue
            h = np.minimum(0.0, objective.values(pts) - fz)
            hits = np.flatnonzero(h < WITNESS_THRESHOLD)
            if hits.size:
                i = int(hits[0])
                return WitnessOutcome(
                    WitnessStatus.WITNESS_FOUND, pts[i].copy(), float(h[i]), checked + i + 1, level
                )
            checked += len(pts)
    return WitnessOutcome(WitnessStatus.UNKNOWN, None, None, checked)
