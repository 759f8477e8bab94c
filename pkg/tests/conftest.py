from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from hypercores.hypergraph import DirectedHyperedge, DirectedHypergraph, UndirectedHyperedge, UndirectedHypergraph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_hd1():
    return DirectedHypergraph(
        "abcd",
        [DirectedHyperedge("e1", {"a", "b"}, {"c"}), DirectedHyperedge("e2", {"c"}, {"d"})],
    )


def make_hu1():
    return UndirectedHypergraph(
        [f"s{i}" for i in range(1, 9)],
        [
            UndirectedHyperedge("A", {"s1", "s2", "s3", "s4"}),
            UndirectedHyperedge("B", {"s1", "s5", "s7"}),
            UndirectedHyperedge("C", {"s5", "s6"}),
            UndirectedHyperedge("D", {"s2", "s8"}),
        ],
    )


@pytest.fixture
def hd1():
    return make_hd1()


@pytest.fixture
def hu1():
    return make_hu1()


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
