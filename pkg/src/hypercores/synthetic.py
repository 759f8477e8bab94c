"""Synthetic hypergraphs used by the test-suite and the CLI demos."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .hypergraph import DirectedHyperedge, DirectedHypergraph, UndirectedHyperedge, UndirectedHypergraph


def planted_core_hypergraph(n: int, clique_size: int = 16) -> UndirectedHypergraph:
    """``n`` cliques of 2-node hyperedges joined by a single hyperedge of ``2n`` nodes.

    The joining hyperedge ``bridge`` holds one node of every clique plus ``n``
    extra nodes that belong to nothing else. Clique ``i`` has nodes
    ``c{i}_{j}``; the extra nodes are ``b{i}``. All weights are 1.
    """
    if n < 1 or clique_size < 2:
        raise ValueError("need n >= 1 and clique_size >= 2")
    width = len(str(max(n, clique_size) - 1))
    nodes, edges = [], []
    for i in range(n):
        block = [f"c{i:0{width}d}_{j:0{width}d}" for j in range(clique_size)]
        nodes += block
        for a, b in combinations(block, 2):
            edges.append(UndirectedHyperedge(f"k{i:0{width}d}:{a}-{b}", {a, b}))
    extra = [f"b{i:0{width}d}" for i in range(n)]
    nodes += extra
    anchors = [f"c{i:0{width}d}_{0:0{width}d}" for i in range(n)]
    edges.append(UndirectedHyperedge("bridge", set(extra) | set(anchors)))
    return UndirectedHypergraph(nodes, edges)


def planted_blocks(n: int, clique_size: int = 16) -> list:
    width = len(str(max(n, clique_size) - 1))
    return [frozenset(f"c{i:0{width}d}_{j:0{width}d}" for j in range(clique_size)) for i in range(n)]


def random_undirected(rng: np.random.Generator, n_nodes: int, n_edges: int, max_size: int = 4,
                      connected: bool = True, weights=(1.0, 1.0)) -> UndirectedHypergraph:
    """Random undirected hypergraph; with ``connected`` a spanning chain of hyperedges is laid first."""
    nodes = [f"v{i:03d}" for i in range(n_nodes)]
    edges = []
    lo, hi = weights
    order = list(rng.permutation(n_nodes))
    if connected and n_nodes > 1:
        seen = [order[0]]
        i = 1
        while i < n_nodes:
            size = int(rng.integers(2, max_size + 1))
            fresh = order[i:i + size - 1]
            anchor = seen[int(rng.integers(len(seen)))]
            members = {nodes[anchor]} | {nodes[x] for x in fresh}
            edges.append(members)
            seen += fresh
            i += len(fresh)
    while len(edges) < n_edges:
        size = int(rng.integers(1, max_size + 1))
        edges.append({nodes[x] for x in rng.choice(n_nodes, size=min(size, n_nodes), replace=False)})
    return UndirectedHypergraph(
        nodes,
        [UndirectedHyperedge(f"e{k:03d}", m, float(rng.uniform(lo, hi))) for k, m in enumerate(edges)],
    )


def random_directed(rng: np.random.Generator, n_nodes: int, n_edges: int, max_side: int = 3,
                    connected: bool = True, weights=(1.0, 1.0)) -> DirectedHypergraph:
    """Random directed hypergraph; with ``connected`` the result is weakly connected."""
    nodes = [f"v{i:03d}" for i in range(n_nodes)]
    lo, hi = weights
    pairs = []

    def draw(pool_size, k):
        return set(int(x) for x in rng.choice(pool_size, size=min(k, pool_size), replace=False))

    if connected and n_nodes > 1:
        order = list(rng.permutation(n_nodes))
        for i in range(1, n_nodes):
            new = order[i]
            old = order[int(rng.integers(i))]
            extra = {order[x] for x in draw(i, int(rng.integers(0, max_side)))}
            side_a, side_b = {old} | extra, {new}
            if side_b <= side_a or side_a == side_b:
                side_a = {old}
            if rng.random() < 0.5:
                side_a, side_b = side_b, side_a
            pairs.append((side_a, side_b))
    while len(pairs) < n_edges:
        tail = draw(n_nodes, int(rng.integers(1, max_side + 1)))
        head = draw(n_nodes, int(rng.integers(1, max_side + 1)))
        if tail != head:
            pairs.append((tail, head))
    return DirectedHypergraph(
        nodes,
        [
            DirectedHyperedge(f"e{k:03d}", {nodes[x] for x in t}, {nodes[x] for x in hd}, float(rng.uniform(lo, hi)))
            for k, (t, hd) in enumerate(pairs)
        ],
    )
