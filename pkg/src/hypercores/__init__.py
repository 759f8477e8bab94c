"""Core detection in directed and undirected hypergraphs via Ollivier-Ricci flow."""

from __future__ import annotations

__version__ = "0.1.0"

from .curvature import all_curvatures, directed_ricci, undirected_ricci
from .flow import FlowConfig, run_flow
from .hypergraph import (
    DirectedHyperedge,
    DirectedHypergraph,
    HypergraphError,
    UndirectedHyperedge,
    UndirectedHypergraph,
)
from .quality import evaluate_core, extract_cores, validity_check
from .transport import emd, solve_transportation

__all__ = [
    "DirectedHyperedge",
    "DirectedHypergraph",
    "FlowConfig",
    "HypergraphError",
    "UndirectedHyperedge",
    "UndirectedHypergraph",
    "all_curvatures",
    "directed_ricci",
    "emd",
    "evaluate_core",
    "extract_cores",
    "run_flow",
    "solve_transportation",
    "undirected_ricci",
    "validity_check",
]
