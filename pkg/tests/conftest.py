import numpy as np
import pytest

from gridshift import HypercubeDomain, ObjectiveHandle


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def make_objective(name, dim, value_fn, gradient_fn, a=-5.0, b=5.0, vectorized=False):
    return ObjectiveHandle(
        name=name,
        dim=dim,
        value_fn=value_fn,
        gradient_fn=gradient_fn,
        default_domain=HypercubeDomain(a, b, dim),
        vectorized=vectorized,
    )


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(name, passed, detail)."""

    def record(name, passed, detail=""):
        ACCEPTANCE_RESULTS.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
