"""Shared strategies, fixtures, and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from layoutkernel.graph import Graph


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    upper = np.triu_indices(n, k=1)
    mask = rng.random(len(upper[0])) < p
    edges = list(zip(upper[0][mask].tolist(), upper[1][mask].tolist()))
    return Graph.from_edges(n, edges)


def random_connected_graph(rng: np.random.Generator, n: int, extra_p: float = 0.2) -> Graph:
    """Random spanning tree plus extra edges; always connected."""
    edges = set()
    for v in range(1, n):
        edges.add((int(rng.integers(v)), v))
    upper = np.triu_indices(n, k=1)
    mask = rng.random(len(upper[0])) < extra_p
    for u, v in zip(upper[0][mask].tolist(), upper[1][mask].tolist()):
        edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))


@st.composite
def graphs(draw, min_n=2, max_n=8, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    picked = set(draw(st.lists(st.sampled_from(pairs), unique=True))) if pairs else set()
    if connected:
        seed = draw(st.integers(0, 2**31 - 1))
        rng = np.random.default_rng(seed)
        for v in range(1, n):
            picked.add((int(rng.integers(v)), v))
    return Graph.from_edges(n, sorted(picked))


# ---- acceptance reporting ----

_acceptance_outcomes: list[tuple[str, str, bool]] = []


def record_acceptance(report) -> None:
    label = report.nodeid.rsplit("::", 1)[-1]
    _acceptance_outcomes.append((label, report.nodeid, report.passed))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        record_acceptance(report)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label, _nodeid, passed in sorted(_acceptance_outcomes):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240901)
