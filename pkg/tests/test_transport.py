from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercores.transport import (
    NodeDistribution,
    TransportError,
    cost_matrix,
    emd,
    penalty_for,
    solve_transportation,
)

from .oracles import lp_transport, vertex_enumeration


def random_instance(rng, m, n, denom=12):
    """Rational masses with common denominator and a random metric cost (points on a line plus noise-free)."""
    a = rng.integers(1, denom, size=m).astype(float)
    b = rng.integers(1, denom, size=n).astype(float)
    a /= a.sum()
    b /= b.sum()
    pts_a = rng.uniform(0, 10, size=(m, 2))
    pts_b = rng.uniform(0, 10, size=(n, 2))
    cost = np.abs(pts_a[:, None, :] - pts_b[None, :, :]).sum(-1)
    return a, b, cost


def test_hu1_example(hu1):
    pl = NodeDistribution({"s5": 0.1, "s1": 0.3, "s7": 0.3, "s6": 0.3})
    pr = NodeDistribution({"s6": 0.1, "s5": 0.9})
    plan = emd(hu1, pl, pr)
    assert plan.objective == pytest.approx(0.8, abs=1e-12)
    assert not plan.used_penalty
    src = np.array([pl[x] for x in plan.sources])
    dst = np.array([pr[x] for x in plan.targets])
    assert vertex_enumeration(src, dst, plan.cost) == pytest.approx(0.8, abs=1e-12)


def test_hd1_cost_matrices(hd1):
    cost, unreachable, _ = cost_matrix(hd1, ["a", "b"], ["d"])
    assert cost.tolist() == [[2.0], [2.0]] and not unreachable.any()
    cost, unreachable, m = cost_matrix(hd1, ["d"], ["a"])
    assert cost.tolist() == [[3.0]] and unreachable.all() and m == 3.0
    assert penalty_for(hd1) == 3.0


def test_penalty_used_when_needed(hd1):
    plan = emd(hd1, {"d": 1.0}, {"a": 1.0})
    assert plan.used_penalty and plan.objective == 3.0


def test_identical_distributions_cost_nothing(hu1):
    p = {"s1": 0.25, "s2": 0.75}
    assert emd(hu1, p, p).objective == 0.0


def test_unbalanced_rejected(hu1):
    with pytest.raises(TransportError):
        emd(hu1, {"s1": 0.5}, {"s2": 1.0})
    with pytest.raises(TransportError):
        NodeDistribution({"s1": -0.5})
    with pytest.raises(TransportError):
        emd(hu1, {}, {"s2": 1.0})


def test_tiny_rounding_is_rebalanced(hu1):
    plan = emd(hu1, {"s1": 0.1, "s2": 0.2, "s3": 0.7}, {"s4": 1.0 + 1e-12})
    assert plan.objective == pytest.approx(1.0)


def test_degenerate_diagonal():
    a = b = np.full(4, 0.25)
    cost = np.ones((4, 4)) - np.eye(4)
    sol = solve_transportation(a, b, cost)
    assert sol.objective == 0.0
    assert np.allclose(sol.flow, np.eye(4) * 0.25)


def test_rejects_bad_input():
    with pytest.raises(TransportError):
        solve_transportation([1.0], [1.0], [[np.inf]])
    with pytest.raises(TransportError):
        solve_transportation([1.0, 0.0], [1.0], [[1.0]])


@pytest.mark.parametrize("m,n", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)])
def test_against_vertex_enumeration(m, n):
    rng = np.random.default_rng(100 * m + n)
    for _ in range(5):
        a, b, cost = random_instance(rng, m, n)
        sol = solve_transportation(a, b, cost)
        assert sol.objective == pytest.approx(vertex_enumeration(a, b, cost), abs=1e-9)


@given(st.integers(0, 2**31), st.integers(1, 7), st.integers(1, 7))
def test_against_lp_and_optimality(seed, m, n):
    rng = np.random.default_rng(seed)
    a, b, cost = random_instance(rng, m, n)
    sol = solve_transportation(a, b, cost)
    assert abs(sol.objective - lp_transport(a, b, cost)) <= 1e-9
    assert np.allclose(sol.flow.sum(1), a, atol=1e-12)
    assert np.allclose(sol.flow.sum(0), b, atol=1e-12)
    assert sol.flow.min() >= 0
    # complementary slackness and dual feasibility certify optimality on their own
    assert sol.min_reduced_cost(cost) >= -1e-9
    dual = sol.row_potentials @ a + sol.col_potentials @ b
    assert dual == pytest.approx(sol.objective, abs=1e-9)


@given(st.integers(0, 2**31))
def test_degenerate_rational_masses(seed):
    # equal masses produce many ties and degenerate pivots
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 6)), int(rng.integers(2, 6))
    a = np.full(m, float(Fraction(1, m)))
    b = np.full(n, float(Fraction(1, n)))
    cost = rng.integers(0, 3, size=(m, n)).astype(float)
    sol = solve_transportation(a, b, cost)
    assert abs(sol.objective - lp_transport(a, b, cost)) <= 1e-9


def test_larger_instance_against_lp():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a, b, cost = random_instance(rng, 20, 25, denom=50)
        assert solve_transportation(a, b, cost).objective == pytest.approx(lp_transport(a, b, cost), abs=1e-9)
