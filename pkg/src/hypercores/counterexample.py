"""A graph family on which one step of the sum-normalized Ricci flow goes negative.

``G(q, k)`` glues a small gadget ``H1`` (nodes ``p1..pq, s, t`` with edges
``{pi, s}``, ``{pi, t}`` and ``f = {s, t}``) to a complete 10-ary tree of depth
``k`` through an edge from ``t`` to the tree root. Curvature is the graph
Ollivier-Ricci curvature with uniform measures on closed neighbourhoods and
unit edge lengths; transport costs come from :mod:`hypercores.transport`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .hypergraph import UndirectedHyperedge, UndirectedHypergraph
from .transport import NodeDistribution, emd

GUARD = 1e-9
BRANCHING = 10
# pinned result of the search in tests/test_counterexample.py
SMALLEST_NEGATIVE = {"k": 1, "q": 13}


class CounterexampleError(ValueError):
    pass


@dataclass
class CounterexampleGraph:
    q: int
    k: int
    graph: UndirectedHypergraph
    classes: dict
    f: str = "f"

    @property
    def m(self) -> int:
        return len(self.graph.hyperedges)

    def endpoints(self, eid):
        return tuple(sorted(self.graph.hyperedges[eid].members))


def tree_size(k: int) -> int:
    return (BRANCHING ** (k + 1) - 1) // (BRANCHING - 1)


def build_gn(q: int, k: int) -> CounterexampleGraph:
    """Construct ``G(q, k)``; every edge has weight 1.

    Tree nodes are named by their digit path from the root ``r`` (``r``,
    ``r0`` .. ``r9``, ``r00`` ...).
    """
    if q < 1 or k < 1:
        raise CounterexampleError("need q >= 1 and k >= 1")
    width = len(str(q))
    ps = [f"p{i:0{width}d}" for i in range(1, q + 1)]
    nodes = ps + ["s", "t"]
    edges, classes = [], {}

    def add(eid, a, b, cls):
        edges.append(UndirectedHyperedge(eid, {a, b}))
        classes[eid] = cls

    for p in ps:
        add(f"{p}-s", p, "s", "p-s")
        add(f"{p}-t", p, "t", "p-t")
    add("f", "s", "t", "f")
    add("bridge", "t", "r", "bridge")
    level = ["r"]
    nodes.append("r")
    for depth in range(1, k + 1):
        nxt = []
        for parent in level:
            for d in range(BRANCHING):
                child = parent + str(d)
                nxt.append(child)
                add(f"{parent}-{child}", parent, child, "tree-leaf" if depth == k else "tree-internal")
        nodes += nxt
        level = nxt
    g = UndirectedHypergraph(nodes, edges)
    expected = 2 * q + 2 + tree_size(k) - 1
    assert len(g.hyperedges) == expected
    return CounterexampleGraph(q, k, g, classes)


def simple_graph(edges) -> UndirectedHypergraph:
    """Unit-weight graph from ``(u, v)`` pairs; edge ids are ``"u-v"`` with endpoints sorted."""
    nodes, out = set(), []
    for u, v in edges:
        if u == v:
            raise CounterexampleError("self-loops are not allowed")
        a, b = sorted((u, v))
        nodes.update((a, b))
        out.append(UndirectedHyperedge(f"{a}-{b}", {a, b}))
    return UndirectedHypergraph(nodes, out)


def closed_neighbourhood(g: UndirectedHypergraph, u: str) -> frozenset:
    out = {u}
    for eid in g.incident_edges(u):
        out |= g.hyperedges[eid].members
    return frozenset(out)


def uniform_on(nodes) -> NodeDistribution:
    nodes = sorted(nodes)
    return NodeDistribution({x: 1.0 / len(nodes) for x in nodes})


class _LocalDistances:
    """Hop distances from a source, by BFS cut at ``radius``; farther targets fall back to a full search.

    Closed neighbourhoods of adjacent nodes are within distance 3 of each
    other, so radius 3 answers every query made by the curvature of an edge.
    """

    def __init__(self, g, radius: int = 3):
        self.g = g
        self.radius = radius
        self._rows = {}

    def distances(self, source):
        row = self._rows.get(source)
        if row is None:
            row = self._rows[source] = _Row(self.g, source, self._bfs(source))
        return row

    def _bfs(self, source):
        dist = {source: 0}
        todo = deque([source])
        while todo:
            x = todo.popleft()
            if dist[x] == self.radius:
                continue
            for eid in self.g.incident_edges(x):
                for y in self.g.hyperedges[eid].members:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        todo.append(y)
        return {x: float(d) for x, d in dist.items()}


class _Row(dict):
    def __init__(self, g, source, near):
        super().__init__(near)
        self._g = g
        self._source = source

    def __missing__(self, v):
        full = self._g.single_source_distances(self._source)
        self.update(full)
        return full[v]


def _edge_measures(g, eid):
    u, v = sorted(g.hyperedges[eid].members)
    return uniform_on(closed_neighbourhood(g, u)), uniform_on(closed_neighbourhood(g, v))


def edge_emd(g, eid, cache=None) -> float:
    pu, pv = _edge_measures(g, eid)
    return emd(g, pu, pv, cache if cache is not None else _LocalDistances(g)).objective


def graph_ollivier_ricci(g, eid, cache=None) -> float:
    """``1 - EMD`` between uniform measures on the closed neighbourhoods of the edge's endpoints."""
    e = g.hyperedges[eid]
    if len(e.members) != 2:
        raise CounterexampleError(f"{eid!r} is not a two-node edge")
    return 1.0 - edge_emd(g, eid, cache)


def tvd(g, eid) -> float:
    pu, pv = _edge_measures(g, eid)
    return 0.5 * math.fsum(abs(pu.get(x, 0.0) - pv.get(x, 0.0)) for x in set(pu) | set(pv))


def all_graph_curvatures(g) -> dict:
    cache = _LocalDistances(g)
    return {eid: graph_ollivier_ricci(g, eid, cache) for eid in g.hyperedges}


def normalized_flow_step(weights: dict, curvatures: dict, s_step: float, w0: dict | None = None, c0: dict | None = None) -> dict:
    """One step of the sum-normalized flow.

    ``w'(e) = w(e) - w(e) C(e) + s w(e) sum_h w(h) C(h) / sum_h w0(h) C0(h)``,
    with ``w0``/``c0`` the weights and curvatures of step 0 (default: the
    current ones, i.e. the first step).
    """
    w0 = weights if w0 is None else w0
    c0 = curvatures if c0 is None else c0
    denom = math.fsum(w0[h] * c0[h] for h in w0)
    if denom == 0:
        raise CounterexampleError("initial weighted curvature sum is zero")
    num = math.fsum(weights[h] * curvatures[h] for h in weights)
    return {e: w - w * curvatures[e] + s_step * w * num / denom for e, w in weights.items()}


def theorem_step(curvatures: dict, s_step: float) -> dict:
    """``1 - C(e) + (s/m) sum_h C(h)``, the reduced unit-weight first step."""
    m = len(curvatures)
    shift = s_step * math.fsum(curvatures.values()) / m
    return {e: 1.0 - c + shift for e, c in curvatures.items()}


PAPER_LEAF_BOUND = Fraction(35, 24)
LEAF_EMD = Fraction(5, 4)


@dataclass
class NegativityReport:
    q: int
    k: int
    s_step: float
    nodes: int
    m: int
    curvature_f: float
    curvature_sum: float
    tvd_f: float
    w1: dict = field(repr=False)
    literal_w1: dict = field(repr=False)
    w1_f: float = 0.0
    min_edge: str = ""
    min_weight: float = 0.0
    checks: dict = field(default_factory=dict)
    class_curvatures: dict = field(default_factory=dict)

    @property
    def negative(self) -> bool:
        return self.w1_f < 0

    def summary(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "s_step": self.s_step,
            "nodes": self.nodes,
            "m": self.m,
            "C_f": self.curvature_f,
            "sum_C": self.curvature_sum,
            "mean_C": self.curvature_sum / self.m,
            "tvd_f": self.tvd_f,
            "w1_f": self.w1_f,
            "literal_w1_f": self.literal_w1["f"],
            "min_edge": self.min_edge,
            "min_weight": self.min_weight,
            "negative": self.negative,
            "class_curvatures": self.class_curvatures,
            "checks": self.checks,
        }


def verify_negativity(q: int, k: int, s_step: float = 1.0) -> NegativityReport:
    """Exact curvatures of ``G(q, k)``, the one-step update and the bound checks.

    ``checks`` holds, per edge class, whether ``1 - 3 TVD <= C <= 1 - TVD`` on
    every edge, whether ``C(f) >= 1 - 3/(q+3)``, and whether the leaf-edge cost
    reaches 35/24 and 5/4. The exact leaf cost at degree 11 is 5/4, so the
    35/24 check fails on every tree.
    """
    if not s_step > 0:
        raise CounterexampleError("step size must be positive")
    cg = build_gn(q, k)
    g = cg.graph
    cache = _LocalDistances(g)
    curv = {eid: graph_ollivier_ricci(g, eid, cache) for eid in g.hyperedges}
    tv = {eid: tvd(g, eid) for eid in g.hyperedges}
    checks = {}
    by_class = {}
    for eid, cls in cg.classes.items():
        by_class.setdefault(cls, []).append(eid)
    class_curv = {}
    for cls, eids in sorted(by_class.items()):
        checks[f"sandwich:{cls}"] = all(1 - 3 * tv[e] - GUARD <= curv[e] <= 1 - tv[e] + GUARD for e in eids)
        vals = sorted({round(curv[e], 12) for e in eids})
        class_curv[cls] = vals[0] if len(vals) == 1 else [vals[0], vals[-1]]
    checks["C_f_lower_bound"] = curv["f"] >= 1 - 3 / (q + 3) - GUARD
    checks["tvd_f_formula"] = abs(tv["f"] - 1 / (q + 3)) <= GUARD
    checks["curvature_at_most_one"] = all(c <= 1 + GUARD for c in curv.values())
    leaf_costs = [1 - curv[e] for e in by_class.get("tree-leaf", [])]
    checks["leaf_emd_ge_35_24"] = all(c >= float(PAPER_LEAF_BOUND) - GUARD for c in leaf_costs)
    checks["leaf_emd_ge_5_4"] = all(c >= float(LEAF_EMD) - GUARD for c in leaf_costs)
    w1 = theorem_step(curv, s_step)
    ones = {e: 1.0 for e in curv}
    literal = normalized_flow_step(ones, curv, s_step)
    min_edge = min(w1, key=lambda e: (w1[e], e))
    return NegativityReport(
        q=q,
        k=k,
        s_step=s_step,
        nodes=len(g.nodes),
        m=cg.m,
        curvature_f=curv["f"],
        curvature_sum=math.fsum(curv.values()),
        tvd_f=tv["f"],
        w1=w1,
        literal_w1=literal,
        w1_f=w1["f"],
        min_edge=min_edge,
        min_weight=w1[min_edge],
        checks=checks,
        class_curvatures=class_curv,
    )


def find_smallest_negative(max_q: int = 200, max_k: int = 3, s_step: float = 1.0):
    """First (k, q) in order of increasing k, then q, with ``w1(f) < 0``; None if none found."""
    for k in range(1, max_k + 1):
        for q in range(1, max_q + 1):
            if verify_negativity(q, k, s_step).negative:
                return {"k": k, "q": q}
    return None
