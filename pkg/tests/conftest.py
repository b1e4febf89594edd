"""Shared fixtures: hand-checkable instances and random-instance helpers."""
from __future__ import annotations

import numpy as np
import pytest

from patrolsched import Instance, RandomSpec, generate_random, make_instance

# Per-criterion verdict lines recorded by the acceptance suite; echoed in the
# terminal summary so they survive output capture in plain ``pytest`` runs.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def unit_triangle() -> Instance:
    """Three points, all pairwise distances 1; weights 1, 1/2, 1/2.

    Small enough to trace every algorithm by hand: the best period-4 patrol
    is a-b-a-c with max absence 2 at every point.
    """
    return make_instance(["a", "b", "c"], [1.0, 0.5, 0.5],
                         [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


@pytest.fixture
def line_four() -> Instance:
    """Four points on a line at 0, 1, 2, 3 with unit weights."""
    d = [[abs(i - j) for j in range(4)] for i in range(4)]
    return make_instance(["p0", "p1", "p2", "p3"], [1.0] * 4, d)


def random_instance(seed: int, n: int, weight_law: str = "uniform",
                    geometry: str = "euclidean-plane") -> Instance:
    return generate_random(RandomSpec(n=n, weight_law=weight_law,
                                      geometry=geometry), seed)


def random_metric_instance(rng: np.random.Generator, n: int) -> Instance:
    """A small instance with a shortest-path-closure metric and random weights."""
    raw = rng.uniform(0.1, 2.0, size=(n, n))
    sym = (raw + raw.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    # all-pairs shortest paths turn any positive symmetric cost into a metric
    d = sym.copy()
    for k in range(n):
        d = np.minimum(d, d[:, k][:, None] + d[k, :][None, :])
    weights = rng.uniform(0.05, 1.0, size=n)
    return make_instance([f"p{i}" for i in range(n)], weights, d)
