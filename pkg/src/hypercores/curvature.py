"""Ollivier-Ricci curvature of hyperedges.

Directed hyperedges compare a tail-side distribution (mass pushed one step
backwards from the tail) with a head-side distribution (mass pushed one step
forwards from the head). Undirected hyperedges average the transport cost
between lazy random-walk distributions of every member pair.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

from .hypergraph import DirectedHypergraph, HypergraphError, UndirectedHypergraph
from .transport import NodeDistribution, emd

DEFAULT_ALPHA = 0.1


class CurvatureError(ValueError):
    pass


def check_alpha(alpha: float) -> float:
    if not 0 < alpha < 1:
        raise CurvatureError(f"laziness must lie in (0, 1), got {alpha}")
    return float(alpha)


class DistanceCache:
    """Memoized single-source distances for one hypergraph snapshot.

    Entries are only valid for the snapshot the cache was built with; the flow
    loop builds a fresh cache every iteration.
    """

    def __init__(self, h):
        self.h = h
        self._dist = {}

    def distances(self, source):
        d = self._dist.get(source)
        if d is None:
            d = self._dist[source] = self.h.single_source_distances(source)
        return d

    def __len__(self):
        return len(self._dist)


# -- directed distributions --------------------------------------------------


def _directed_spread(h: DirectedHypergraph, nodes, back_edges, spread_side):
    share = 1.0 / len(nodes)
    mass = defaultdict(float)
    for x in sorted(nodes):
        through = back_edges(x)
        if not through:
            mass[x] += share
            continue
        per_edge = share / len(through)
        for f in through:
            side = spread_side(h.hyperedges[f])
            per_node = per_edge / len(side)
            for y in sorted(side):
                mass[y] += per_node
    return NodeDistribution(mass)


def directed_tail_distribution(h: DirectedHypergraph, eid: str) -> NodeDistribution:
    """Tail-side distribution: each tail node's share flows back over its incoming hyperedges."""
    e = h.hyperedges[eid]
    return _directed_spread(h, e.tail, h.in_edges, lambda f: f.tail)


def directed_head_distribution(h: DirectedHypergraph, eid: str) -> NodeDistribution:
    """Head-side distribution: each head node's share flows forward over its outgoing hyperedges."""
    e = h.hyperedges[eid]
    return _directed_spread(h, e.head, h.out_edges, lambda f: f.head)


def directed_tail_distribution_closed_form(h: DirectedHypergraph, eid: str) -> NodeDistribution:
    """Pointwise evaluation of the tail distribution, one target node ``y`` at a time."""
    tail = h.hyperedges[eid].tail
    k = len(tail)
    out = {}
    for y in h.nodes:
        p = 1.0 / k if (y in tail and not h.in_edges(y)) else 0.0
        for f in h.out_edges(y):
            ef = h.hyperedges[f]
            for x in ef.head & tail:
                p += 1.0 / (k * len(h.in_edges(x)) * len(ef.tail))
        if p:
            out[y] = p
    return NodeDistribution(out)


def directed_head_distribution_closed_form(h: DirectedHypergraph, eid: str) -> NodeDistribution:
    head = h.hyperedges[eid].head
    k = len(head)
    out = {}
    for y in h.nodes:
        p = 1.0 / k if (y in head and not h.out_edges(y)) else 0.0
        for f in h.in_edges(y):
            ef = h.hyperedges[f]
            for x in ef.tail & head:
                p += 1.0 / (k * len(h.out_edges(x)) * len(ef.head))
        if p:
            out[y] = p
    return NodeDistribution(out)


# -- undirected distributions ------------------------------------------------


def undirected_node_distribution(h: UndirectedHypergraph, x: str, alpha: float = DEFAULT_ALPHA) -> NodeDistribution:
    """Lazy walk from ``x``: keep ``alpha``, spread the rest over incident hyperedges by size.

    A node that only lies in singleton hyperedges keeps all of its mass.
    """
    check_alpha(alpha)
    incident = h.incident_edges(x)
    if not incident:
        raise HypergraphError(f"node {x!r} is isolated")
    denom = sum(len(h.hyperedges[f].members) - 1 for f in incident)
    if denom == 0:
        return NodeDistribution({x: 1.0})
    mass = defaultdict(float)
    mass[x] = alpha
    for f in incident:
        members = h.hyperedges[f].members
        if len(members) == 1:
            continue
        share = (1.0 - alpha) * (len(members) - 1) / denom
        per_node = share / (len(members) - 1)
        for y in sorted(members - {x}):
            mass[y] += per_node
    return NodeDistribution(mass)


def undirected_node_distribution_closed_form(h: UndirectedHypergraph, x: str, alpha: float = DEFAULT_ALPHA) -> NodeDistribution:
    check_alpha(alpha)
    incident = h.incident_edges(x)
    if not incident:
        raise HypergraphError(f"node {x!r} is isolated")
    denom = sum(len(h.hyperedges[f].members) - 1 for f in incident)
    if denom == 0:
        return NodeDistribution({x: 1.0})
    shared = defaultdict(int)
    for f in incident:
        for y in h.hyperedges[f].members:
            if y != x:
                shared[y] += 1
    out = {y: (1.0 - alpha) * c / denom for y, c in shared.items()}
    out[x] = alpha
    return NodeDistribution(out)


# -- curvature ---------------------------------------------------------------


def directed_ricci(h: DirectedHypergraph, eid: str, cache: DistanceCache | None = None) -> float:
    w = h.weight(eid)
    if w <= 0:
        raise CurvatureError(f"hyperedge {eid!r} has zero weight; prune it before computing curvature")
    pl = directed_tail_distribution(h, eid)
    pr = directed_head_distribution(h, eid)
    return 1.0 - emd(h, pl, pr, cache if cache is not None else DistanceCache(h)).objective / w


def undirected_ricci(
    h: UndirectedHypergraph,
    eid: str,
    alpha: float = DEFAULT_ALPHA,
    cache: DistanceCache | None = None,
    node_dists: dict | None = None,
) -> float:
    members = sorted(h.hyperedges[eid].members)
    if len(members) == 1:
        return 1.0
    cache = cache if cache is not None else DistanceCache(h)
    if node_dists is None:
        node_dists = {}
    for x in members:
        if x not in node_dists:
            node_dists[x] = undirected_node_distribution(h, x, alpha)
    total = math.fsum(emd(h, node_dists[p], node_dists[q], cache).objective for p, q in combinations(members, 2))
    return 1.0 - total / math.comb(len(members), 2)


def all_curvatures(h, alpha: float = DEFAULT_ALPHA, threads: int = 1) -> dict:
    """Curvature of every hyperedge of ``h``, keyed by hyperedge id."""
    cache = DistanceCache(h)
    if h.directed:
        def one(eid):
            return directed_ricci(h, eid, cache)
    else:
        check_alpha(alpha)
        node_dists = {}
        for eid, e in h.hyperedges.items():
            if len(e.members) > 1:
                for x in e.members:
                    if x not in node_dists:
                        node_dists[x] = undirected_node_distribution(h, x, alpha)

        def one(eid):
            return undirected_ricci(h, eid, alpha, cache, node_dists)

    eids = list(h.hyperedges)
    if threads > 1 and len(eids) > 1:
        # concurrent cache fills may race, but both writers store identical values
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, eids))
    else:
        values = [one(eid) for eid in eids]
    return dict(zip(eids, values))
