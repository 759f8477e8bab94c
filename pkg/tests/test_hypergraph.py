from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercores.hypergraph import (
    DirectedHyperedge,
    DirectedHypergraph,
    HypergraphError,
    UndirectedHyperedge,
    UndirectedHypergraph,
    components,
    degrees,
    distance,
    remove_nodes,
    single_source_distances,
)
from hypercores.synthetic import random_directed, random_undirected

from .oracles import floyd_warshall


def test_hd1_degrees(hd1):
    assert degrees(hd1, "c").in_degree == 1
    assert degrees(hd1, "c").out_degree == 1
    d = degrees(hd1, "a")
    assert (d.in_degree, d.out_degree) == (0, 1)


def test_hu1_degree(hu1):
    assert degrees(hu1, "s1").degree == 2
    assert degrees(hu1, "s1").in_degree is None


def test_unknown_node(hd1):
    with pytest.raises(HypergraphError):
        degrees(hd1, "zz")


def test_hd1_distances(hd1):
    assert distance(hd1, "a", "d") == 2.0
    assert math.isinf(distance(hd1, "d", "a"))
    assert single_source_distances(hd1, "a") == {"a": 0.0, "c": 1.0, "d": 2.0, "b": math.inf}


def test_hu1_distances(hu1):
    assert distance(hu1, "s6", "s8") == 4.0
    assert single_source_distances(hu1, "s5") == {
        "s5": 0.0, "s1": 1.0, "s7": 1.0, "s6": 1.0, "s2": 2.0, "s3": 2.0, "s4": 2.0, "s8": 3.0,
    }


def test_weighted_distance_takes_cheaper_route():
    h = UndirectedHypergraph(
        "abc",
        [UndirectedHyperedge("x", {"a", "c"}, 5.0), UndirectedHyperedge("y", {"a", "b"}, 1.0), UndirectedHyperedge("z", {"b", "c"}, 1.5)],
    )
    assert distance(h, "a", "c") == 2.5


def test_components(hu1):
    assert components(hu1) == [frozenset(hu1.nodes)]
    cut = hu1.without_edges(["B"])
    assert components(cut) == [frozenset({"s1", "s2", "s3", "s4", "s8"}), frozenset({"s5", "s6"}), frozenset({"s7"})]


def test_hu1_without_b_components_as_stated():
    # s7 belongs only to B, so it is isolated once B is gone
    from .conftest import make_hu1

    comps = make_hu1().without_edges(["B"]).components()
    assert frozenset({"s5", "s6"}) in comps
    assert frozenset({"s1", "s2", "s3", "s4", "s8"}) in comps


def test_directed_components_are_weak(hd1):
    assert components(hd1) == [frozenset("abcd")]


def test_remove_nodes(hd1, hu1):
    r = remove_nodes(hd1, {"c"})
    assert r.nodes == ("a", "b", "d") and not r.hyperedges
    r = remove_nodes(hu1, {"s8"})
    assert set(r.hyperedges) == {"A", "B", "C"}
    assert remove_nodes(hu1, set()) is hu1
    with pytest.raises(HypergraphError):
        remove_nodes(hd1, set("abcd"))
    with pytest.raises(HypergraphError):
        remove_nodes(hd1, {"q"})


def test_validation():
    with pytest.raises(HypergraphError):
        DirectedHyperedge("e", set(), {"a"})
    with pytest.raises(HypergraphError):
        DirectedHyperedge("e", {"a"}, {"a"})
    with pytest.raises(HypergraphError):
        UndirectedHyperedge("e", {"a"}, -1.0)
    with pytest.raises(HypergraphError):
        UndirectedHypergraph("a", [UndirectedHyperedge("e", {"a", "b"})])
    with pytest.raises(HypergraphError):
        UndirectedHypergraph("ab", [UndirectedHyperedge("e", {"a"}), UndirectedHyperedge("e", {"b"})])


def test_sink_never_in_tail():
    with pytest.raises(HypergraphError):
        DirectedHypergraph("ab", [DirectedHyperedge("e", {"a"}, {"b"})], sink="a")
    h = DirectedHypergraph("ab", [DirectedHyperedge("e", {"a"}, {"b"})], sink="b")
    assert h.sink == "b"
    assert h.remove_nodes({"b"}).sink is None


def test_singleton_edge_is_a_self_loop():
    h = UndirectedHypergraph("ab", [UndirectedHyperedge("s", {"a"}), UndirectedHyperedge("e", {"a", "b"})])
    assert degrees(h, "a").degree == 2
    assert distance(h, "a", "b") == 1.0


def test_reweight_and_equality(hu1):
    w = hu1.with_weights({"A": 2.5})
    assert w.weight("A") == 2.5 and w.weight("B") == 1.0
    assert w != hu1
    assert w.with_weights({"A": 1.0}) == hu1


@given(st.integers(0, 10_000), st.booleans())
def test_dijkstra_matches_floyd_warshall(seed, directed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    e = int(rng.integers(1, 2 * n))
    gen = random_directed if directed else random_undirected
    h = gen(rng, n, e, connected=bool(rng.integers(2)), weights=(0.1, 3.0))
    oracle = floyd_warshall(h)
    for u in h.nodes:
        row = single_source_distances(h, u)
        for v in h.nodes:
            a, b = row[v], oracle[(u, v)]
            assert (math.isinf(a) and math.isinf(b)) or abs(a - b) <= 1e-12 * max(1.0, b)


@given(st.integers(0, 10_000))
def test_removing_nodes_never_shortens_paths(seed):
    rng = np.random.default_rng(seed)
    h = random_undirected(rng, 9, 12, weights=(0.5, 2.0))
    drop = {h.nodes[int(rng.integers(len(h.nodes)))]}
    cut = h.remove_nodes(drop)
    for u in cut.nodes:
        full = h.single_source_distances(u)
        part = cut.single_source_distances(u)
        for v in cut.nodes:
            assert part[v] >= full[v] - 1e-12
