"""Checks of convergence theory against recorded traces."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import ObjectiveHandle
from .core import HypercubeDomain, NonFiniteError, as_point
from .optimizer import Trace

SLACK = 1e-9


class DegenerateLipschitzWarning(UserWarning):
    """Every sampled gradient difference was zero (affine objective)."""


@dataclass(frozen=True)
class RateCheckReport:
    """Outcome of the O(1/k) bound check from iteration M on.

    `violations` holds (k, lhs, rhs) triples for
    f(x_k) - f* <= |x_M - x*|^2 / (2 t (k - M)). `averaged_violations` does the
    same for the cumulative form (1/k) sum_{i=M+1..k} (f(x_i) - f*) <=
    |x_M - x*|^2 / (2 t k); it is informational and does not affect `passed`.
    """

    M: int
    violations: list[tuple[int, float, float]]
    averaged_violations: list[tuple[int, float, float]] = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


def sample_interior(dom: HypercubeDomain, n: int, seed: int, margin: float = 1e-3) -> np.ndarray:
    """`n` seeded uniform points at least `margin * (b - a)` inside the box."""
    pad = margin * dom.width
    rng = np.random.default_rng(seed)
    return rng.uniform(dom.a + pad, dom.b - pad, size=(n, dom.d))


def _probe(objective: ObjectiveHandle):
    """Objective evaluator for difference quotients.

    Uses extended precision when the raw function accepts it: with h = 1e-6
    and |f| ~ 1e5, float64 rounding alone would put ~1e-5 of noise on each
    difference quotient.
    """
    wide = np.longdouble
    if np.finfo(wide).eps < np.finfo(np.float64).eps:
        try:
            trial = objective.value_fn(np.zeros(objective.dim, dtype=wide))
            if np.asarray(trial).dtype == wide:
                def value(p):
                    objective.counters.add_values(1)
                    return objective.value_fn(p)
                return value, wide
        except (TypeError, ValueError):
            pass
    return objective.value, np.float64


def check_gradient_fd(objective: ObjectiveHandle, x, h: float = 1e-6) -> float:
    """Worst per-coordinate mismatch between the analytic and central-difference gradient.

    Relative error where the analytic component has magnitude >= 1, absolute
    error otherwise.
    """
    p = as_point(x, objective.dim)
    g = objective.gradient(p)
    value, dtype = _probe(objective)
    base = p.astype(dtype)
    fd = np.empty_like(p)
    for i in range(p.size):
        e = np.zeros_like(base)
        e[i] = h
        fp = value(base + e)
        fm = value(base - e)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NonFiniteError(f"objective not finite near {p.tolist()} along axis {i}")
        fd[i] = float((fp - fm) / (2 * dtype(h)))
    diff = np.abs(g - fd)
    scale = np.where(np.abs(g) >= 1.0, np.abs(g), 1.0)
    return float(np.max(diff / scale))


def estimate_lipschitz(
    objective: ObjectiveHandle,
    dom: HypercubeDomain,
    samples: int,
    seed: int,
) -> float:
    """Sampled lower bound on the gradient's Lipschitz constant.

    Half of the pairs are independent uniform draws in the box; the other
    half pair each draw with a neighbour at distance ~1e-3 of the box width,
    which picks up sharp local curvature that far-apart pairs average away.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    rng = np.random.default_rng(seed)
    n_far = samples // 2
    n_near = samples - n_far
    xs = rng.uniform(dom.a, dom.b, size=(samples, dom.d))
    ys_far = rng.uniform(dom.a, dom.b, size=(n_far, dom.d))
    radius = 1e-3 * dom.width
    ys_near = np.clip(xs[n_far:] + rng.uniform(-radius, radius, size=(n_near, dom.d)), dom.a, dom.b)
    ys = np.concatenate([ys_far, ys_near])

    best = 0.0
    for x, y in zip(xs, ys):
        dx = np.linalg.norm(x - y)
        if dx == 0.0:
            continue
        ratio = np.linalg.norm(objective.gradient(x) - objective.gradient(y)) / dx
        best = max(best, float(ratio))
    if best == 0.0:
        warnings.warn(
            f"{objective.name}: sampled gradient differences are all zero",
            DegenerateLipschitzWarning,
            stacklevel=2,
        )
    return best


def verify_monotone_descent(trace: Trace, slack: float = SLACK) -> list[int]:
    """Iterations where f(x_k) > f(z_k) - (t/2) |grad f(z_k)|^2 + slack.

    Record 0 carries no gradient step and is skipped.
    """
    t = trace.config.step_size
    bad = []
    for r in trace.records[1:]:
        if r.f_x_k > r.f_z_k - 0.5 * t * r.grad_norm**2 + slack:
            bad.append(r.k)
    return bad


def detect_ball_entry(trace: Trace, x_star, r: float) -> int | None:
    """Smallest M with |x_k - x*| <= r for every k >= M, or None."""
    xs = trace.x_array()
    star = as_point(x_star, xs.shape[1])
    outside = np.flatnonzero(np.linalg.norm(xs - star, axis=1) > r)
    if outside.size == 0:
        return 0
    M = int(outside[-1]) + 1
    return M if M < len(xs) else None


def verify_rate_bound(
    trace: Trace,
    x_star,
    f_star: float,
    M: int,
    slack: float = SLACK,
) -> RateCheckReport:
    t = trace.config.step_size
    xs = trace.x_array()
    star = as_point(x_star, xs.shape[1])
    gaps = trace.f_values() - f_star
    radius_sq = float(np.sum((xs[M] - star) ** 2))

    violations = []
    averaged = []
    running = 0.0
    for k in range(M + 1, len(gaps)):
        rhs = radius_sq / (2 * t * (k - M))
        if gaps[k] > rhs + slack:
            violations.append((k, float(gaps[k]), rhs))
        running += gaps[k]
        avg_rhs = radius_sq / (2 * t * k)
        if running / k > avg_rhs + slack:
            averaged.append((k, running / k, avg_rhs))
    return RateCheckReport(M, violations, averaged, checked=max(0, len(gaps) - M - 1))
