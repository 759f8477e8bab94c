"""Core extraction and core quality metrics.

A core is a connected component of the hypergraph left after the flow. It is
scored on the ORIGINAL hypergraph with degree-based cohesiveness ratios and two
centrality measures that look at what happens to shortest paths between the
remaining nodes once the core is deleted.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

log = logging.getLogger(__name__)

DEFAULT_SIZE_BAND = (0.01, 0.5)
COHESION_THRESHOLD = 0.5
STRETCH_THRESHOLD = 1.5
DISCONNECTED_THRESHOLD = 0.5
P_THRESHOLD = 1e-5

DIRECTED_METRICS = ("r_in", "r_out", "stretch", "disconnected")
UNDIRECTED_METRICS = ("r_deg", "stretch", "disconnected")


class QualityError(ValueError):
    pass


def metric_names(directed: bool) -> tuple:
    return DIRECTED_METRICS if directed else UNDIRECTED_METRICS


@dataclass(frozen=True)
class Core:
    nodes: frozenset
    component: int
    fraction: float

    @property
    def size(self) -> int:
        return len(self.nodes)


class CoreList(list):
    """List of cores that also carries a human-readable diagnostic."""

    def __init__(self, cores=(), diagnostic: str = ""):
        super().__init__(cores)
        self.diagnostic = diagnostic


def extract_cores(final_h, original_h, kappa: int = 2, size_band=DEFAULT_SIZE_BAND) -> CoreList:
    """Top ``kappa`` components of ``final_h`` whose size fraction lies inside ``size_band``.

    Components are ranked by size (descending), ties by smallest node. The
    sink node is never a core member. Bounds of the band are inclusive.
    """
    if kappa < 1:
        raise QualityError("kappa must be >= 1")
    lo, hi = size_band
    if not 0 <= lo <= hi <= 1:
        raise QualityError(f"bad size band {size_band!r}")
    if set(final_h.nodes) != set(original_h.nodes):
        raise QualityError("final and original hypergraphs have different node sets")
    n = len(original_h.nodes)
    sink = getattr(original_h, "sink", None)
    candidates = []
    for idx, comp in enumerate(final_h.components()):
        if sink is not None and sink in comp:
            log.info("sink %r dropped from component %d", sink, idx)
            comp = comp - {sink}
        if not comp:
            continue
        frac = len(comp) / n
        if lo <= frac <= hi:
            candidates.append(Core(frozenset(comp), idx, frac))
    candidates.sort(key=lambda c: (-c.size, min(c.nodes)))
    chosen = candidates[:kappa]
    if chosen:
        diag = f"{len(candidates)} component(s) in size band [{lo}, {hi}], reporting {len(chosen)}"
    else:
        sizes = sorted((len(c) for c in final_h.components()), reverse=True)
        diag = f"no component in size band [{lo}, {hi}] of {n} nodes; component sizes {sizes[:10]}"
        log.info(diag)
    return CoreList(chosen, diag)


# -- cohesiveness --------------------------------------------------------------


def _check_subset(h, S):
    S = frozenset(S)
    if not S:
        raise QualityError("empty core")
    for x in S:
        h.check_node(x)
    if len(S) == len(h.nodes):
        raise QualityError("core must be a proper subset of the nodes")
    return S


def cohesiveness_undirected(h, S) -> float:
    """Mean over core nodes of (degree inside the induced sub-hypergraph) / (degree in ``h``)."""
    S = _check_subset(h, S)
    inner = h.restricted_to(S)
    total = 0.0
    for x in sorted(S):
        d = h.degrees(x).degree
        if d == 0:
            raise QualityError(f"node {x!r} has degree 0")
        total += inner.degrees(x).degree / d
    return total / len(S)


def cohesiveness_directed(h, S):
    """(r_in, r_out); nodes with in-degree (resp. out-degree) 0 in ``h`` are left out of that average."""
    S = _check_subset(h, S)
    inner = h.restricted_to(S)
    ins, outs = [], []
    for x in sorted(S):
        full, sub = h.degrees(x), inner.degrees(x)
        if full.in_degree:
            ins.append(sub.in_degree / full.in_degree)
        if full.out_degree:
            outs.append(sub.out_degree / full.out_degree)
    if not ins or not outs:
        raise QualityError("no core node has a nonzero in-degree" if not ins else "no core node has a nonzero out-degree")
    return math.fsum(ins) / len(ins), math.fsum(outs) / len(outs)


# -- centrality ----------------------------------------------------------------


@dataclass
class Centrality:
    disconnected: float
    stretch: float
    zeta: int
    xi: int
    never_connected: int
    pairs: int
    stretch_undefined: bool = False


class DistanceTable:
    """Lazily filled single-source distances of one hypergraph."""

    def __init__(self, h):
        self.h = h
        self._rows = {}

    def row(self, u):
        r = self._rows.get(u)
        if r is None:
            r = self._rows[u] = self.h.single_source_distances(u)
        return r


def _centrality(h, all_cores, S, ordered: bool, table: DistanceTable | None):
    S = _check_subset(h, S)
    rest = len(h.nodes) - len(S)
    if rest < 2:
        raise QualityError("fewer than two nodes remain outside the core")
    covered = set(S)
    for c in all_cores:
        covered |= set(c)
    outside = sorted(set(h.nodes) - covered)
    table = table if table is not None else DistanceTable(h)
    cut = h.remove_nodes(S)
    cut_rows = {u: cut.single_source_distances(u) for u in outside}
    pairs = [(u, v) for u in outside for v in outside if u != v] if ordered else list(combinations(outside, 2))
    zeta = xi = never = 0
    ratios = []
    for u, v in pairs:
        before = table.row(u)[v]
        after = cut_rows[u][v]
        if math.isinf(before):
            never += 1
        elif math.isinf(after):
            zeta += 1
        else:
            xi += 1
            if before == 0:
                if after != 0:
                    raise QualityError(f"zero-length path {u!r}-{v!r} stretched to {after}")
                ratios.append(1.0)
            else:
                ratios.append(after / before)
    denom = rest * (rest - 1) if ordered else rest * (rest - 1) // 2
    if xi:
        stretch, undefined = math.fsum(ratios) / xi, False
    else:
        stretch, undefined = 1.0, True
    return Centrality(zeta / denom, stretch, zeta, xi, never, len(pairs), undefined)


def centrality_directed(h, all_cores, S, table: DistanceTable | None = None) -> Centrality:
    """Ordered-pair disconnection fraction and distance stretch after deleting ``S``.

    Pairs range over nodes outside every core in ``all_cores`` (``S`` included);
    the disconnection denominator counts ordered pairs of ``V \\ S``.
    """
    if not h.directed:
        raise QualityError("centrality_directed needs a directed hypergraph")
    return _centrality(h, all_cores, S, True, table)


def centrality_undirected(h, all_cores, S, table: DistanceTable | None = None) -> Centrality:
    if h.directed:
        raise QualityError("centrality_undirected needs an undirected hypergraph")
    return _centrality(h, all_cores, S, False, table)


# -- reports -------------------------------------------------------------------


@dataclass
class Verdict:
    valid: bool
    reasons: list = field(default_factory=list)


@dataclass
class CoreQualityReport:
    nodes: tuple
    directed: bool
    metrics: dict
    centrality: Centrality
    p_values: dict = field(default_factory=dict)
    verdict: Verdict | None = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    def to_dict(self) -> dict:
        c = self.centrality
        return {
            "size": self.size,
            "nodes": list(self.nodes),
            "metrics": dict(self.metrics),
            "zeta": c.zeta,
            "xi": c.xi,
            "never_connected": c.never_connected,
            "stretch_undefined": c.stretch_undefined,
            "p_values": dict(self.p_values),
            "valid": None if self.verdict is None else self.verdict.valid,
            "reasons": [] if self.verdict is None else list(self.verdict.reasons),
        }


def core_metrics(h, all_cores, S, table: DistanceTable | None = None):
    """Metric dict (ordered as in :func:`metric_names`) plus the centrality record."""
    if h.directed:
        r_in, r_out = cohesiveness_directed(h, S)
        c = centrality_directed(h, all_cores, S, table)
        return {"r_in": r_in, "r_out": r_out, "stretch": c.stretch, "disconnected": c.disconnected}, c
    r = cohesiveness_undirected(h, S)
    c = centrality_undirected(h, all_cores, S, table)
    return {"r_deg": r, "stretch": c.stretch, "disconnected": c.disconnected}, c


def evaluate_core(h, all_cores, S, table: DistanceTable | None = None) -> CoreQualityReport:
    metrics, c = core_metrics(h, all_cores, S, table)
    return CoreQualityReport(tuple(sorted(S)), h.directed, metrics, c)


def validity_check(report: CoreQualityReport) -> Verdict:
    """Apply the cohesiveness, centrality and significance thresholds; list every failure."""
    m = report.metrics
    reasons = []
    cohesion = ("r_in", "r_out") if report.directed else ("r_deg",)
    for name in cohesion:
        if not m[name] > COHESION_THRESHOLD:
            reasons.append(f"cohesiveness {name} = {m[name]:.4f} <= {COHESION_THRESHOLD}")
    if not (m["stretch"] >= STRETCH_THRESHOLD or m["disconnected"] >= DISCONNECTED_THRESHOLD):
        reasons.append(
            f"centrality thresholds: stretch {m['stretch']:.4f} < {STRETCH_THRESHOLD} "
            f"and disconnected {m['disconnected']:.4f} < {DISCONNECTED_THRESHOLD}"
        )
    names = metric_names(report.directed)
    if not report.p_values:
        reasons.append("significance: p-values not computed")
    else:
        for name in names:
            p = report.p_values.get(name)
            if p is None or not p < P_THRESHOLD:
                reasons.append(f"significance: p({name}) = {p} >= {P_THRESHOLD}")
    verdict = Verdict(not reasons, reasons)
    report.verdict = verdict
    return verdict
