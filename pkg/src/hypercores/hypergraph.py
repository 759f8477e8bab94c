"""Weighted directed and undirected hypergraphs.

Both hypergraph classes are immutable after construction. Nodes and hyperedges
are identified by strings and every iteration order in this module is sorted,
so repeated runs visit nodes and hyperedges in the same order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

INF = math.inf


class HypergraphError(ValueError):
    """Raised for malformed hypergraphs or queries on unknown nodes."""


@dataclass(frozen=True)
class DirectedHyperedge:
    id: str
    tail: frozenset
    head: frozenset
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tail", frozenset(self.tail))
        object.__setattr__(self, "head", frozenset(self.head))
        if not self.tail or not self.head:
            raise HypergraphError(f"hyperedge {self.id!r}: tail and head must be nonempty")
        if self.tail == self.head:
            raise HypergraphError(f"hyperedge {self.id!r}: tail equals head")
        if not self.weight >= 0:
            raise HypergraphError(f"hyperedge {self.id!r}: negative weight {self.weight}")

    @property
    def nodes(self) -> frozenset:
        return self.tail | self.head

    def reweighted(self, weight: float) -> "DirectedHyperedge":
        return DirectedHyperedge(self.id, self.tail, self.head, weight)


@dataclass(frozen=True)
class UndirectedHyperedge:
    id: str
    members: frozenset
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise HypergraphError(f"hyperedge {self.id!r}: empty member set")
        if not self.weight >= 0:
            raise HypergraphError(f"hyperedge {self.id!r}: negative weight {self.weight}")

    @property
    def nodes(self) -> frozenset:
        return self.members

    def reweighted(self, weight: float) -> "UndirectedHyperedge":
        return UndirectedHyperedge(self.id, self.members, weight)


@dataclass(frozen=True)
class Degree:
    """Degree record; ``in_degree``/``out_degree`` are None for undirected hypergraphs."""

    degree: int
    in_degree: int | None = None
    out_degree: int | None = None


class _Hypergraph:
    directed: bool = False

    def __init__(self, nodes: Iterable[str], hyperedges: Iterable, labels: Mapping[str, str] | None = None):
        self._nodes = tuple(sorted(set(nodes)))
        node_set = frozenset(self._nodes)
        edges = {}
        for e in hyperedges:
            if e.id in edges:
                raise HypergraphError(f"duplicate hyperedge id {e.id!r}")
            missing = e.nodes - node_set
            if missing:
                raise HypergraphError(f"hyperedge {e.id!r} references unknown nodes {sorted(missing)}")
            edges[e.id] = e
        self._edges = {eid: edges[eid] for eid in sorted(edges)}
        self._node_set = node_set
        self.labels = dict(labels) if labels else {}
        self._index()

    def _index(self):
        raise NotImplementedError

    # -- basic accessors -------------------------------------------------

    @property
    def nodes(self) -> tuple:
        return self._nodes

    @property
    def hyperedges(self) -> dict:
        return self._edges

    def __contains__(self, node) -> bool:
        return node in self._node_set

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self._nodes == other._nodes
            and self._edges == other._edges
            and self._extra_state() == other._extra_state()
        )

    def __hash__(self):
        return hash((type(self), self._nodes, tuple(self._edges.values())))

    def _extra_state(self):
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|V|={len(self._nodes)}, |E|={len(self._edges)})"

    def label(self, node: str) -> str:
        return self.labels.get(node, node)

    def weight(self, eid: str) -> float:
        return self._edges[eid].weight

    def weights(self) -> dict:
        return {eid: e.weight for eid, e in self._edges.items()}

    def total_weight(self) -> float:
        return math.fsum(e.weight for e in self._edges.values())

    def check_node(self, node) -> None:
        if node not in self._node_set:
            raise HypergraphError(f"unknown node {node!r}")

    # -- derived hypergraphs ---------------------------------------------

    def _rebuild(self, nodes, hyperedges):
        return type(self)(nodes, hyperedges, labels=self.labels)

    def with_weights(self, weights: Mapping[str, float]) -> "_Hypergraph":
        """Copy with the given hyperedges reweighted; hyperedges absent from ``weights`` keep their weight."""
        unknown = set(weights) - set(self._edges)
        if unknown:
            raise HypergraphError(f"unknown hyperedges {sorted(unknown)}")
        return self._rebuild(
            self._nodes,
            [e.reweighted(weights[eid]) if eid in weights else e for eid, e in self._edges.items()],
        )

    def without_edges(self, eids: Iterable[str]) -> "_Hypergraph":
        drop = set(eids)
        return self._rebuild(self._nodes, [e for eid, e in self._edges.items() if eid not in drop])

    def restricted_to(self, nodes: Iterable[str]) -> "_Hypergraph":
        """Sub-hypergraph induced by ``nodes``: hyperedges fully inside the node set survive."""
        keep = frozenset(nodes)
        for x in keep:
            self.check_node(x)
        return self._rebuild(keep, [e for e in self._edges.values() if e.nodes <= keep])

    def remove_nodes(self, removed: Iterable[str]) -> "_Hypergraph":
        """Delete ``removed`` and every hyperedge touching it. The result may be disconnected."""
        removed = frozenset(removed)
        for x in removed:
            self.check_node(x)
        if removed and removed == self._node_set:
            raise HypergraphError("cannot remove every node of the hypergraph")
        if not removed:
            return self
        return self.restricted_to(self._node_set - removed)

    # -- connectivity ------------------------------------------------------

    def components(self) -> list:
        """Connected components (weak components for directed hypergraphs), ordered by smallest node."""
        parent = {x: x for x in self._nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self._edges.values():
            it = iter(sorted(e.nodes))
            root = find(next(it))
            for y in it:
                ry = find(y)
                if ry != root:
                    if ry < root:
                        root, ry = ry, root
                    parent[ry] = root
        groups: dict = {}
        for x in self._nodes:
            groups.setdefault(find(x), set()).add(x)
        return sorted((frozenset(g) for g in groups.values()), key=min)

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def require_connected(self) -> None:
        comps = self.components()
        if len(comps) != 1:
            kind = "weakly connected" if self.directed else "connected"
            raise HypergraphError(f"hypergraph is not {kind}: {len(comps)} components")

    # -- distances -------------------------------------------------------

    def _successor_edges(self, node):
        raise NotImplementedError

    def _edge_targets(self, eid):
        raise NotImplementedError

    def single_source_distances(self, source: str) -> dict:
        """Shortest hyperpath lengths from ``source``; unreachable nodes map to ``inf``.

        Crossing a hyperedge costs its weight no matter which member pair is used,
        so each hyperedge is relaxed once, from the first of its entry nodes to be settled.
        """
        self.check_node(source)
        dist = {source: 0.0}
        heap = [(0.0, source)]
        settled = set()
        used = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in settled:
                continue
            settled.add(x)
            for eid in self._successor_edges(x):
                if eid in used:
                    continue
                used.add(eid)
                nd = d + self._edges[eid].weight
                for y in self._edge_targets(eid):
                    if nd < dist.get(y, INF):
                        dist[y] = nd
                        heapq.heappush(heap, (nd, y))
        return {v: dist.get(v, INF) for v in self._nodes}

    def distance(self, u: str, v: str) -> float:
        self.check_node(v)
        return self.single_source_distances(u)[v]


class DirectedHypergraph(_Hypergraph):
    """Directed hypergraph with hyperedges ``tail -> head`` and an optional sink node."""

    directed = True

    def __init__(self, nodes, hyperedges, labels=None, sink: str | None = None):
        self.sink = sink
        super().__init__(nodes, hyperedges, labels)
        if sink is not None:
            self.check_node(sink)
            bad = [eid for eid in self._out[sink]]
            if bad:
                raise HypergraphError(f"sink {sink!r} appears in the tail of {bad}")

    def _extra_state(self):
        return self.sink

    def _rebuild(self, nodes, hyperedges):
        sink = self.sink if self.sink in set(nodes) else None
        return DirectedHypergraph(nodes, hyperedges, labels=self.labels, sink=sink)

    def _index(self):
        self._out = {x: [] for x in self._nodes}
        self._in = {x: [] for x in self._nodes}
        for eid, e in self._edges.items():
            for x in e.tail:
                self._out[x].append(eid)
            for x in e.head:
                self._in[x].append(eid)
        self._heads = {eid: tuple(sorted(e.head)) for eid, e in self._edges.items()}

    def out_edges(self, node) -> list:
        """Hyperedges having ``node`` in their tail."""
        self.check_node(node)
        return self._out[node]

    def in_edges(self, node) -> list:
        """Hyperedges having ``node`` in their head."""
        self.check_node(node)
        return self._in[node]

    def degrees(self, node) -> Degree:
        self.check_node(node)
        din, dout = len(self._in[node]), len(self._out[node])
        return Degree(degree=len(set(self._in[node]) | set(self._out[node])), in_degree=din, out_degree=dout)

    def _successor_edges(self, node):
        return self._out[node]

    def _edge_targets(self, eid):
        return self._heads[eid]


class UndirectedHypergraph(_Hypergraph):
    """Undirected hypergraph; singleton hyperedges are allowed."""

    directed = False
    sink = None

    def _index(self):
        self._inc = {x: [] for x in self._nodes}
        for eid, e in self._edges.items():
            for x in e.members:
                self._inc[x].append(eid)
        self._members = {eid: tuple(sorted(e.members)) for eid, e in self._edges.items()}

    def incident_edges(self, node) -> list:
        self.check_node(node)
        return self._inc[node]

    def degrees(self, node) -> Degree:
        self.check_node(node)
        return Degree(degree=len(self._inc[node]))

    def _successor_edges(self, node):
        return self._inc[node]

    def _edge_targets(self, eid):
        return self._members[eid]


Hypergraph = DirectedHypergraph | UndirectedHypergraph


def degrees(h: Hypergraph, x: str) -> Degree:
    return h.degrees(x)


def distance(h: Hypergraph, u: str, v: str) -> float:
    return h.distance(u, v)


def single_source_distances(h: Hypergraph, u: str) -> dict:
    return h.single_source_distances(u)


def components(h: Hypergraph) -> list:
    return h.components()


def remove_nodes(h: Hypergraph, removed: Iterable[str]) -> Hypergraph:
    return h.remove_nodes(removed)
