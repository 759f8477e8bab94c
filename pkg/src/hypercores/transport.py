"""Exact earth mover's distance between node distributions on a hypergraph.

The transportation problem is solved with the transportation simplex method
(least-cost start, MODI potentials, stepping-stone pivots) on the complete
bipartite graph between the two supports. Unreachable node pairs are priced
at a finite penalty ``1 + total hyperedge weight`` so the program stays feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

MASS_TOL = 1e-9


class TransportError(ValueError):
    pass


class NodeDistribution(dict):
    """Sparse probability mass over nodes. Zero entries are dropped."""

    def __init__(self, masses: Mapping[str, float] = (), **kwargs):
        super().__init__()
        for node, mass in dict(masses, **kwargs).items():
            if mass < 0:
                if mass < -MASS_TOL:
                    raise TransportError(f"negative mass {mass} at {node!r}")
                continue
            if mass > 0:
                self[node] = float(mass)

    @property
    def support(self) -> list:
        return sorted(self)

    def total(self) -> float:
        return math.fsum(self.values())

    def validate(self, tol: float = MASS_TOL) -> "NodeDistribution":
        if not self:
            raise TransportError("distribution has empty support")
        if abs(self.total() - 1.0) > tol:
            raise TransportError(f"distribution sums to {self.total()!r}, not 1")
        return self


@dataclass
class TransportSolution:
    flow: np.ndarray
    objective: float
    row_potentials: np.ndarray
    col_potentials: np.ndarray
    pivots: int = 0

    def min_reduced_cost(self, cost: np.ndarray) -> float:
        r = cost - self.row_potentials[:, None] - self.col_potentials[None, :]
        return float(r.min())


@dataclass
class TransportPlan:
    sources: tuple
    targets: tuple
    shipments: np.ndarray
    objective: float
    cost: np.ndarray
    penalty: float
    used_penalty: bool
    row_potentials: np.ndarray = field(repr=False)
    col_potentials: np.ndarray = field(repr=False)

    def lanes(self) -> dict:
        """Nonzero shipments keyed by (source, target)."""
        out = {}
        for i, u in enumerate(self.sources):
            for j, v in enumerate(self.targets):
                if self.shipments[i, j] > 0:
                    out[(u, v)] = float(self.shipments[i, j])
        return out


def _initial_basis(a, b, cost):
    """Least-cost rule crossing out exactly one line per allocation (m+n-1 basic cells)."""
    m, n = cost.shape
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    flow = np.zeros((m, n))
    row_alive = np.ones(m, bool)
    col_alive = np.ones(n, bool)
    rows_left, cols_left = m, n
    basis = []
    order = np.lexsort((np.tile(np.arange(n), m), np.repeat(np.arange(m), n), cost.ravel()))
    for flat in order:
        i, j = divmod(int(flat), n)
        if not (row_alive[i] and col_alive[j]):
            continue
        q = min(a[i], b[j])
        flow[i, j] = q
        basis.append((i, j))
        if rows_left == 1 and cols_left == 1:
            break
        if cols_left == 1 or (rows_left > 1 and a[i] <= b[j]):
            b[j] -= q
            a[i] = 0.0
            row_alive[i] = False
            rows_left -= 1
        else:
            a[i] -= q
            b[j] = 0.0
            col_alive[j] = False
            cols_left -= 1
    return flow, basis


def _potentials(cost, basis, m, n):
    adj = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    pot = np.full(m + n, np.nan)
    pot[0] = 0.0
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if np.isnan(pot[y]):
                if x < m:
                    pot[y] = cost[x, y - m] - pot[x]
                else:
                    pot[y] = cost[y, x - m] - pot[x]
                stack.append(y)
    return pot[:m], pot[m:], adj


def _tree_path(adj, start, goal):
    prev = {start: None}
    stack = [start]
    while stack:
        x = stack.pop()
        if x == goal:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    path = [goal]
    while path[-1] != start:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def solve_transportation(supply, demand, cost, max_pivots: int | None = None) -> TransportSolution:
    """Exact minimum-cost balanced transportation.

    ``supply`` (m,) and ``demand`` (n,) must be non-negative with equal totals;
    ``cost`` is (m, n) and finite. Returns flows, objective and dual potentials
    satisfying ``cost - u - v >= -tol`` at optimality.
    """
    a = np.asarray(supply, float)
    b = np.asarray(demand, float)
    cost = np.asarray(cost, float)
    m, n = cost.shape
    if a.shape != (m,) or b.shape != (n,):
        raise TransportError("supply/demand shapes do not match the cost matrix")
    if m == 0 or n == 0:
        raise TransportError("empty support")
    if not np.all(np.isfinite(cost)):
        raise TransportError("cost matrix must be finite")

    if m == 1 or n == 1:
        flow = b[None, :].copy() if m == 1 else a[:, None].copy()
        u = np.zeros(m) if m == 1 else cost[:, 0].copy()
        v = cost[0, :].copy() if m == 1 else np.zeros(n)
        return TransportSolution(flow, float(np.sum(flow * cost)), u, v)

    flow, basis = _initial_basis(a, b, cost)
    in_basis = np.zeros((m, n), bool)
    for cell in basis:
        in_basis[cell] = True
    scale = max(1.0, float(np.abs(cost).max()))
    tol = 1e-12 * scale
    limit = max_pivots or 50 * (m + n) * (m + n)
    degenerate_run = 0
    pivots = 0
    while True:
        u, v, adj = _potentials(cost, basis, m, n)
        reduced = cost - u[:, None] - v[None, :]
        reduced[in_basis] = 0.0
        if reduced.min() >= -tol:
            break
        if degenerate_run > m + n:
            # Bland's rule: first improving cell in row-major order, guards against cycling.
            flat = int(np.flatnonzero(reduced.ravel() < -tol)[0])
        else:
            flat = int(np.argmin(reduced))
        ei, ej = divmod(flat, n)
        path = _tree_path(adj, ei, m + ej)
        # path alternates row/col nodes from row ei to column ej; walking back from
        # the column end the cells take signs -, +, -, ...
        cells = []
        for k in range(len(path) - 1):
            x, y = path[k], path[k + 1]
            cells.append((x, y - m) if x < m else (y, x - m))
        minus = cells[::-2]
        plus = cells[-2::-2]
        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] == theta)
        for c in minus:
            flow[c] -= theta
        for c in plus:
            flow[c] += theta
        flow[ei, ej] += theta
        flow[leaving] = 0.0
        basis.remove(leaving)
        basis.append((ei, ej))
        in_basis[leaving] = False
        in_basis[ei, ej] = True
        degenerate_run = degenerate_run + 1 if theta == 0 else 0
        pivots += 1
        if pivots > limit:
            raise TransportError("transportation simplex exceeded its pivot limit")
    np.clip(flow, 0.0, None, out=flow)
    return TransportSolution(flow, float(np.sum(flow * cost)), u, v, pivots)


def penalty_for(h) -> float:
    """Finite stand-in for an infinite distance: exceeds every simple path length."""
    return 1.0 + h.total_weight()


def cost_matrix(h, src_support, dst_support, cache=None):
    """Distances from each source-support node to each target-support node, penalty for ``inf``.

    ``cache`` is any mapping-like object with ``distances(source)``; if omitted,
    single-source searches are run directly.
    """
    src = list(src_support)
    dst = list(dst_support)
    if not src or not dst:
        raise TransportError("empty support")
    penalty = penalty_for(h)
    cost = np.empty((len(src), len(dst)))
    for i, u in enumerate(src):
        d = cache.distances(u) if cache is not None else h.single_source_distances(u)
        for j, v in enumerate(dst):
            h.check_node(v)
            cost[i, j] = d[v]
    unreachable = ~np.isfinite(cost)
    cost[unreachable] = penalty
    return cost, unreachable, penalty


def _balanced(pl: Mapping, pr: Mapping):
    pl = NodeDistribution(pl)
    pr = NodeDistribution(pr)
    if not pl or not pr:
        raise TransportError("empty support")
    sl, sr = pl.total(), pr.total()
    if abs(sl - sr) > MASS_TOL:
        raise TransportError(f"unbalanced masses: {sl!r} vs {sr!r}")
    src, dst = pl.support, pr.support
    a = np.array([pl[x] for x in src])
    b = np.array([pr[x] for x in dst])
    if sl < sr:
        a *= sr / sl
    elif sr < sl:
        b *= sl / sr
    return src, dst, a, b


def emd(h, pl: Mapping, pr: Mapping, cache=None) -> TransportPlan:
    """Earth mover's distance from ``pl`` to ``pr`` under hypergraph distances of ``h``."""
    src, dst, a, b = _balanced(pl, pr)
    cost, unreachable, penalty = cost_matrix(h, src, dst, cache)
    sol = solve_transportation(a, b, cost)
    used = bool(np.any(sol.flow[unreachable] > 0))
    return TransportPlan(
        sources=tuple(src),
        targets=tuple(dst),
        shipments=sol.flow,
        objective=sol.objective,
        cost=cost,
        penalty=penalty,
        used_penalty=used,
        row_potentials=sol.row_potentials,
        col_potentials=sol.col_potentials,
    )


def emd_value(h, pl: Mapping, pr: Mapping, cache=None) -> float:
    return emd(h, pl, pr, cache).objective
