"""Discrete Ricci flow with sigmoid renormalization and periodic surgery.

One iteration on the current snapshot: curvature of every live hyperedge,
``w <- w * (1 - Ric)``, pruning of hyperedges whose weight reached zero,
``w <- 1 / (1 + exp(-w))``, every ``tau`` iterations removal of the
heaviest ``delta`` percent of live hyperedges, then the change statistics.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .curvature import DEFAULT_ALPHA, all_curvatures

log = logging.getLogger(__name__)

DIRECTED_EPSILON = 0.005
UNDIRECTED_EPSILON = 0.000005
# weights at or below this after an update count as zero and are pruned
ZERO_WEIGHT = 1e-12


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class FlowConfig:
    eta: int = 40
    tau: int = 2
    delta: float = 8.0
    kappa: int = 2
    epsilon: float | None = None
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.eta < 1:
            raise FlowError("eta must be >= 1")
        if self.tau < 1:
            raise FlowError("tau must be >= 1")
        if not 0 < self.delta < 100:
            raise FlowError("delta must lie in (0, 100)")
        if self.kappa < 1:
            raise FlowError("kappa must be >= 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise FlowError("epsilon must be positive")
        if not 0 < self.alpha < 1:
            raise FlowError("alpha must lie in (0, 1)")
        if self.threads < 1:
            raise FlowError("threads must be >= 1")

    def epsilon_for(self, directed: bool) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return DIRECTED_EPSILON if directed else UNDIRECTED_EPSILON


@dataclass
class IterationRecord:
    index: int
    delta_ave: float | None
    delta_std: float | None
    common_edges: int
    pruned: list = field(default_factory=list)
    removed: list = field(default_factory=list)
    live_edges: int = 0


@dataclass
class FlowTrace:
    records: list = field(default_factory=list)
    epsilon: float = 0.0
    first_converged: int | None = None
    early_stop: bool = False
    final: object = None

    def delta_std_at(self, index: int) -> float | None:
        for r in self.records:
            if r.index == index:
                return r.delta_std
        return None

    def to_lines(self) -> str:
        """One JSON record per iteration, newline terminated."""
        lines = [json.dumps(asdict(r), sort_keys=True) for r in self.records]
        return "".join(line + "\n" for line in lines)


def flow_step(weights: Mapping[str, float], curvatures: Mapping[str, float]):
    """``w * (1 - Ric)`` for every live hyperedge; returns (new weights, ids that hit zero)."""
    new, pruned = {}, []
    for eid, w in weights.items():
        if eid not in curvatures:
            raise FlowError(f"no curvature for hyperedge {eid!r}")
        nw = w - w * curvatures[eid]
        if nw <= ZERO_WEIGHT:
            pruned.append(eid)
        else:
            new[eid] = nw
    return new, pruned


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def sigmoid_renormalize(weights: Mapping[str, float]) -> dict:
    return {eid: sigmoid(w) for eid, w in weights.items()}


def surgery_count(delta: float, live: int) -> int:
    if live == 0:
        return 0
    # exact rational arithmetic so 8% of 100 is 8, not 9
    return min(live, math.ceil(Fraction(str(delta)) * live / 100))


def surgery(weights: Mapping[str, float], delta: float) -> list:
    """Ids of the ceil(delta% * |E|) heaviest hyperedges, heaviest first, ties by id."""
    k = surgery_count(delta, len(weights))
    ranked = sorted(weights, key=lambda eid: (-weights[eid], eid))
    return ranked[:k]


def convergence_metrics(w_prev: Mapping[str, float], w_next: Mapping[str, float]):
    """Mean and population standard deviation of |w_next - w_prev| over common hyperedges."""
    common = sorted(set(w_prev) & set(w_next))
    if not common:
        raise FlowError("no hyperedge is live in both iterations")
    diffs = np.array([abs(w_next[e] - w_prev[e]) for e in common])
    ave = float(diffs.mean())
    std = float(np.sqrt(np.mean((ave - diffs) ** 2)))
    return ave, std


def run_flow(h, cfg: FlowConfig = FlowConfig(), check_connected: bool = True, on_iteration=None):
    """Run ``cfg.eta`` flow iterations on ``h``; returns (final hypergraph, trace)."""
    if check_connected:
        h.require_connected()
    if any(w <= 0 for w in h.weights().values()):
        raise FlowError("input hyperedge weights must be positive")
    trace = FlowTrace(epsilon=cfg.epsilon_for(h.directed))
    current = h
    weights = h.weights()
    for t in range(1, cfg.eta + 1):
        if not weights:
            trace.early_stop = True
            break
        curv = all_curvatures(current, cfg.alpha, cfg.threads)
        raw, pruned = flow_step(weights, curv)
        new = sigmoid_renormalize(raw)
        removed = surgery(new, cfg.delta) if t % cfg.tau == 0 else []
        for eid in removed:
            del new[eid]
        # measured over hyperedges that survived both pruning and surgery
        common = set(weights) & set(new)
        ave, std = convergence_metrics(weights, new) if common else (None, None)
        current = current.without_edges(pruned + removed).with_weights(new)
        rec = IterationRecord(
            index=t,
            delta_ave=ave,
            delta_std=std,
            common_edges=len(common),
            pruned=sorted(pruned),
            removed=sorted(removed),
            live_edges=len(new),
        )
        trace.records.append(rec)
        if trace.first_converged is None and ave is not None and ave <= trace.epsilon:
            trace.first_converged = t
        log.debug("iteration %d: ave=%s std=%s live=%d", t, ave, std, len(new))
        if on_iteration is not None:
            on_iteration(t, current, curv, raw)
        weights = new
    trace.final = current
    return current, trace
