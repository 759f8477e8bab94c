from __future__ import annotations

import math

import pytest

from hypercores.counterexample import (
    LEAF_EMD,
    SMALLEST_NEGATIVE,
    CounterexampleError,
    all_graph_curvatures,
    build_gn,
    find_smallest_negative,
    graph_ollivier_ricci,
    normalized_flow_step,
    simple_graph,
    theorem_step,
    tree_size,
    tvd,
    verify_negativity,
)


def test_sizes():
    cg = build_gn(4, 1)
    assert len(cg.graph.nodes) == 17 and cg.m == 20
    assert tree_size(3) == 1111
    big = build_gn(2, 3)
    assert sum(1 for c in big.classes.values() if c == "tree-leaf") == 1000


def test_t_has_degree_q_plus_two():
    cg = build_gn(1, 1)
    assert cg.graph.degrees("t").degree == 3
    assert cg.endpoints("f") == ("s", "t")
    assert cg.endpoints("bridge") == ("r", "t")


def test_bad_parameters():
    with pytest.raises(CounterexampleError):
        build_gn(0, 1)
    with pytest.raises(CounterexampleError):
        verify_negativity(3, 1, s_step=0.0)


def test_small_graph_curvatures():
    assert graph_ollivier_ricci(simple_graph([("a", "b")]), "a-b") == pytest.approx(1.0)
    path = simple_graph([("a", "b"), ("b", "c")])
    assert graph_ollivier_ricci(path, "a-b") == pytest.approx(0.5)
    assert tvd(path, "a-b") == pytest.approx(1 / 3)
    tri = simple_graph([("a", "b"), ("b", "c"), ("a", "c")])
    assert all_graph_curvatures(tri) == pytest.approx({"a-b": 1.0, "b-c": 1.0, "a-c": 1.0})


def test_normalized_step_on_triangle():
    tri = simple_graph([("a", "b"), ("b", "c"), ("a", "c")])
    curv = all_graph_curvatures(tri)
    w = normalized_flow_step({e: 1.0 for e in curv}, curv, 1.0)
    assert w == pytest.approx({e: 1.0 for e in curv})


def test_normalized_step_general_t():
    w = normalized_flow_step({"a": 2.0, "b": 1.0}, {"a": 0.5, "b": 0.5}, 0.5, w0={"a": 1.0, "b": 1.0}, c0={"a": 1.0, "b": 1.0})
    # ratio (2*0.5 + 1*0.5) / 2 = 0.75
    assert w == pytest.approx({"a": 2 - 1 + 0.5 * 2 * 0.75, "b": 1 - 0.5 + 0.5 * 0.75})
    with pytest.raises(CounterexampleError):
        normalized_flow_step({"a": 1.0, "b": 1.0}, {"a": 1.0, "b": -1.0}, 1.0)


def test_first_step_forms_differ_by_a_constant():
    curv = all_graph_curvatures(build_gn(3, 1).graph)
    s = 0.7
    literal = normalized_flow_step({e: 1.0 for e in curv}, curv, s)
    reduced = theorem_step(curv, s)
    shift = s - s * math.fsum(curv.values()) / len(curv)
    for e in curv:
        assert literal[e] == pytest.approx(reduced[e] + shift, abs=1e-12)
        # the literal form at t=0 is 1 - C + s and never negative
        assert literal[e] > 0


def test_smallest_negative_is_pinned():
    assert find_smallest_negative(max_q=60, max_k=3) == SMALLEST_NEGATIVE
    k, q = SMALLEST_NEGATIVE["k"], SMALLEST_NEGATIVE["q"]
    assert not verify_negativity(q - 1, k).negative
    assert verify_negativity(q, k).negative


def test_q1_minimum_is_elsewhere():
    rep = verify_negativity(1, 1)
    assert not rep.negative and rep.min_weight < 0 and rep.min_edge != "f"


@pytest.mark.parametrize("q,k", [(1, 1), (5, 1), (13, 1), (3, 2), (40, 2)])
def test_bounds_hold(q, k):
    rep = verify_negativity(q, k)
    for name, ok in rep.checks.items():
        if name != "leaf_emd_ge_35_24":
            assert ok, name


def test_leaf_cost_is_five_quarters():
    rep = verify_negativity(3, 2)
    assert rep.class_curvatures["tree-leaf"] == pytest.approx(1 - float(LEAF_EMD))
    assert rep.class_curvatures["tree-internal"] == pytest.approx(-1.5)
    # 35/24 overstates the leaf transport cost
    assert not rep.checks["leaf_emd_ge_35_24"]
    assert rep.checks["leaf_emd_ge_5_4"]


def test_default_instance_is_negative():
    rep = verify_negativity(40, 3)
    assert rep.negative
    assert rep.curvature_f >= 1 - 3 / 43
    assert rep.tvd_f == pytest.approx(1 / 43)
    assert rep.summary()["literal_w1_f"] > 0
