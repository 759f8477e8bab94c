"""Reading hypergraphs from reaction lists, BiGG models, co-author lists and the native format."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .hypergraph import DirectedHyperedge, DirectedHypergraph, UndirectedHyperedge, UndirectedHypergraph

log = logging.getLogger(__name__)

SINK = "__sink__"
NATIVE_FORMAT = "hypercores-native"
NATIVE_VERSION = 1
DEFAULT_MAX_AUTHORS = 15


class IngestError(ValueError):
    """Parse or construction failure; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Reaction:
    id: str
    reactants: tuple
    products: tuple = ()
    reversible: bool = False
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "reactants", tuple(dict.fromkeys(self.reactants)))
        object.__setattr__(self, "products", tuple(dict.fromkeys(self.products)))
        if not self.reactants:
            raise IngestError(f"reaction {self.id!r} has no reactants")

    def reversed(self) -> "Reaction":
        return Reaction(self.id + "_rev", self.products, self.reactants, self.reversible, self.weight)


@dataclass(frozen=True)
class PaperRecord:
    id: str
    authors: tuple

    def __post_init__(self):
        object.__setattr__(self, "authors", tuple(dict.fromkeys(self.authors)))
        if not self.authors:
            raise IngestError(f"paper {self.id!r} has no authors")


# -- reaction text ---------------------------------------------------------------

_ARROW = re.compile(r"<=>|<->|-->|->|=>")
_COEF = re.compile(r"^(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?$")


def _side(text: str, lineno: int, offset: int) -> list:
    text = text.strip()
    if not text:
        return []
    species = []
    for term in text.split(" + "):
        parts = term.split()
        if len(parts) == 2 and _COEF.match(parts[0]):
            parts = parts[1:]
        if len(parts) != 1:
            col = offset + max(0, text.find(term.strip())) + 1
            raise IngestError(f"cannot read species {term.strip()!r}", lineno, col)
        species.append(parts[0])
    return species


def parse_reaction_line(line: str, lineno: int = 1) -> Reaction | None:
    """Parse ``[id:] A + 2 B -> C [; weight]``. Blank and ``#`` lines give None.

    ``<=>`` or ``<->`` mark the reaction reversible. Stoichiometric
    coefficients are read and discarded.
    """
    body = line.split("#", 1)[0].rstrip()
    if not body.strip():
        return None
    weight = 1.0
    if ";" in body:
        body, wtext = body.split(";", 1)
        try:
            weight = float(wtext)
        except ValueError:
            raise IngestError(f"bad weight {wtext.strip()!r}", lineno, len(body) + 2) from None
        if not (math.isfinite(weight) and weight > 0):
            raise IngestError(f"weight must be positive, got {weight}", lineno, len(body) + 2)
    rid = f"R{lineno}"
    offset = 0
    head = body.split(":", 1)
    if len(head) == 2 and not _ARROW.search(head[0]):
        rid = head[0].strip()
        if not rid or " " in rid:
            raise IngestError(f"bad reaction id {head[0]!r}", lineno, 1)
        offset = len(head[0]) + 1
        body_rest = head[1]
    else:
        body_rest = body
    m = _ARROW.search(body_rest)
    if m is None:
        raise IngestError("missing arrow (->, =>, <=>)", lineno, offset + 1)
    left = _side(body_rest[: m.start()], lineno, offset)
    right = _side(body_rest[m.end():], lineno, offset + m.end())
    if not left:
        raise IngestError(f"reaction {rid!r} has no reactants", lineno, offset + 1)
    return Reaction(rid, tuple(left), tuple(right), m.group() in ("<=>", "<->"), weight)


def parse_reactions(text: str) -> list:
    out, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), 1):
        r = parse_reaction_line(line, lineno)
        if r is None:
            continue
        if r.id in seen:
            raise IngestError(f"duplicate reaction id {r.id!r}", lineno, 1)
        seen.add(r.id)
        out.append(r)
    return out


def largest_component(h):
    """The component with the most nodes (ties: the one holding the smallest node)."""
    comps = h.components()
    if len(comps) <= 1:
        return h
    best = sorted(comps, key=lambda c: (-len(c), min(c)))[0]
    log.info("input not connected: keeping %d of %d nodes (%d components)", len(best), len(h.nodes), len(comps))
    return h.restricted_to(best)


def reactions_to_hypergraph(reactions, reverse: bool = False, sink: str = SINK) -> DirectedHypergraph:
    """One hyperedge ``reactants -> products`` per reaction; productless reactions feed ``sink``.

    With ``reverse`` every reversible reaction with products also contributes
    the opposite hyperedge. Reactions whose two sides are equal carry no
    direction and are skipped. The largest weakly connected component is kept.
    """
    edges, nodes = [], set()
    uses_sink = False
    for r in reactions:
        for side in (r.reactants, r.products):
            if sink in side:
                raise IngestError(f"reaction {r.id!r} uses the reserved sink name {sink!r}")
        todo = [r]
        if reverse and r.reversible and r.products:
            todo.append(r.reversed())
        for x in todo:
            head = x.products or (sink,)
            if set(x.reactants) == set(head):
                log.warning("reaction %r has identical sides; skipped", x.id)
                continue
            uses_sink |= not x.products
            nodes.update(x.reactants, head)
            edges.append(DirectedHyperedge(x.id, x.reactants, head, x.weight))
    if not edges:
        raise IngestError("no usable reactions")
    h = DirectedHypergraph(nodes, edges, sink=sink if uses_sink else None)
    return largest_component(h)


# -- BiGG models -------------------------------------------------------------------


def _bigg_json(doc, reverse):
    if not isinstance(doc, dict) or not isinstance(doc.get("reactions"), list):
        raise IngestError("BiGG JSON document needs a 'reactions' list")
    out = []
    for k, rx in enumerate(doc["reactions"]):
        try:
            rid = str(rx["id"])
            mets = rx["metabolites"]
        except (KeyError, TypeError):
            raise IngestError(f"reaction #{k} lacks 'id' or 'metabolites'") from None
        lower = float(rx.get("lower_bound", 0.0))
        out.append(_from_coefficients(rid, mets, lower < 0))
    return _with_reverse(out, reverse)


def _from_coefficients(rid, coeffs, reversible):
    reactants = tuple(sorted(m for m, c in coeffs.items() if float(c) < 0))
    products = tuple(sorted(m for m, c in coeffs.items() if float(c) > 0))
    if not reactants:
        raise IngestError(f"reaction {rid!r} has no metabolite with a negative coefficient")
    return Reaction(rid, reactants, products, reversible)


def _with_reverse(reactions, reverse):
    if not reverse:
        return reactions
    out = []
    for r in reactions:
        out.append(r)
        if r.reversible and r.products:
            out.append(r.reversed())
    # reversal is done here, so strip the flag to avoid doubling later
    return [Reaction(r.id, r.reactants, r.products, False, r.weight) for r in out]


def _local(tag):
    return tag.rsplit("}", 1)[-1]


def _bigg_sbml(root, reverse):
    params = {}
    for el in root.iter():
        if _local(el.tag) == "parameter" and el.get("id") is not None and el.get("value") is not None:
            params[el.get("id")] = float(el.get("value"))
    out = []
    for el in root.iter():
        if _local(el.tag) != "reaction":
            continue
        rid = el.get("id")
        if rid is None:
            raise IngestError("SBML reaction without id")
        coeffs = {}
        for part in el:
            name = _local(part.tag)
            if name not in ("listOfReactants", "listOfProducts"):
                continue
            sign = -1.0 if name == "listOfReactants" else 1.0
            for ref in part:
                sp = ref.get("species")
                if sp is None:
                    raise IngestError(f"reaction {rid!r}: speciesReference without species")
                coeffs[sp] = coeffs.get(sp, 0.0) + sign * float(ref.get("stoichiometry", "1"))
        lower = None
        for key, val in el.attrib.items():
            if _local(key) == "lowerFluxBound":
                lower = params.get(val)
        if lower is not None:
            reversible = lower < 0
        else:
            reversible = el.get("reversible", "false").lower() == "true"
        if rid.startswith("R_"):
            rid = rid[2:]
        coeffs = {(m[2:] if m.startswith("M_") else m): c for m, c in coeffs.items() if c != 0}
        out.append(_from_coefficients(rid, coeffs, reversible))
    if not out:
        raise IngestError("SBML document has no reactions")
    return _with_reverse(out, reverse)


def parse_bigg_model(source, reverse: bool = False) -> list:
    """Reactions of a BiGG model given as JSON or SBML text (or a path to either).

    Negative coefficients become reactants, positive ones products. With
    ``reverse`` a reaction whose lower flux bound is negative also yields a
    reversed copy with id suffix ``_rev``.
    """
    text = source
    if not isinstance(source, str) or not source.lstrip().startswith(("{", "<")):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed BiGG JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return _bigg_json(doc, reverse)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise IngestError(f"malformed SBML: {exc}", line, col + 1) from None
    return _bigg_sbml(root, reverse)


# -- co-authorship ---------------------------------------------------------------


def normalize_author(name: str) -> str:
    return " ".join(name.split()).casefold()


def parse_coauthor_csv(text: str) -> list:
    """Rows ``paper_id,authors`` with authors separated by ``;``. A header row is optional."""
    out, seen = [], set()
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if lineno == 1 and [c.strip().lower() for c in row[:2]] == ["paper_id", "authors"]:
            continue
        if len(row) < 2:
            raise IngestError("expected paper_id,authors", lineno, 1)
        pid = row[0].strip()
        authors = [a for cell in row[1:] for a in cell.split(";") if a.strip()]
        if not pid:
            raise IngestError("empty paper id", lineno, 1)
        if not authors:
            raise IngestError(f"paper {pid!r} lists no authors", lineno, len(row[0]) + 2)
        if pid in seen:
            raise IngestError(f"duplicate paper id {pid!r}", lineno, 1)
        seen.add(pid)
        out.append(PaperRecord(pid, tuple(a.strip() for a in authors)))
    return out


def filter_papers(records, max_authors: int = DEFAULT_MAX_AUTHORS):
    """Split records into (kept, dropped) by the ``max_authors`` cut-off (dropped when >=)."""
    kept, dropped = [], []
    for r in records:
        n = len({normalize_author(a) for a in r.authors})
        (dropped if n >= max_authors else kept).append(r)
    return kept, dropped


def papers_to_hypergraph(records, max_authors: int = DEFAULT_MAX_AUTHORS) -> UndirectedHypergraph:
    """One hyperedge per paper on normalized author names; the largest component is returned."""
    records = list(records)
    if not records:
        raise IngestError("no paper records")
    kept, dropped = filter_papers(records, max_authors)
    if dropped:
        log.info("dropped %d paper(s) with %d or more authors", len(dropped), max_authors)
    if not kept:
        raise IngestError(f"every paper has {max_authors} or more authors")
    labels, edges = {}, []
    for r in kept:
        members = set()
        for a in r.authors:
            key = normalize_author(a)
            labels.setdefault(key, " ".join(a.split()))
            members.add(key)
        edges.append(UndirectedHyperedge(r.id, members))
    h = UndirectedHypergraph(labels, edges, labels={k: v for k, v in labels.items() if k != v})
    return largest_component(h)


# -- statistics ------------------------------------------------------------------


@dataclass(frozen=True)
class HypergraphStats:
    directed: bool
    nodes: int
    hyperedges: int
    avg_degree: float = 0.0
    max_degree: int = 0
    min_degree: int = 0
    avg_in_degree: float | None = None
    max_in_degree: int | None = None
    min_in_degree: int | None = None
    avg_out_degree: float | None = None
    max_out_degree: int | None = None
    min_out_degree: int | None = None

    def rows(self) -> list:
        """(label, value) pairs in table order."""
        rows = [("|V|", self.nodes), ("|E|", self.hyperedges)]
        if self.directed:
            rows += [
                ("avg in-degree", round(self.avg_in_degree, 4)),
                ("max in-degree", self.max_in_degree),
                ("min in-degree", self.min_in_degree),
                ("avg out-degree", round(self.avg_out_degree, 4)),
                ("max out-degree", self.max_out_degree),
                ("min out-degree", self.min_out_degree),
            ]
        else:
            rows += [
                ("avg degree", round(self.avg_degree, 4)),
                ("max degree", self.max_degree),
                ("min degree", self.min_degree),
            ]
        return rows


def _agg(values):
    if not values:
        return 0.0, 0, 0
    return sum(values) / len(values), max(values), min(values)


def first_order_stats(h) -> HypergraphStats:
    degs = [h.degrees(x) for x in h.nodes]
    avg, mx, mn = _agg([d.degree for d in degs])
    if not h.directed:
        return HypergraphStats(False, len(h.nodes), len(h.hyperedges), avg, mx, mn)
    ai, xi, ni = _agg([d.in_degree for d in degs])
    ao, xo, no = _agg([d.out_degree for d in degs])
    return HypergraphStats(True, len(h.nodes), len(h.hyperedges), avg, mx, mn, ai, xi, ni, ao, xo, no)


# -- native format ---------------------------------------------------------------


def to_native(h) -> dict:
    doc = {
        "format": NATIVE_FORMAT,
        "version": NATIVE_VERSION,
        "directed": h.directed,
        "sink": h.sink,
        "nodes": [{"id": x, "label": h.labels[x]} if x in h.labels else {"id": x} for x in h.nodes],
    }
    if h.directed:
        doc["hyperedges"] = [
            {"id": e.id, "tail": sorted(e.tail), "head": sorted(e.head), "weight": e.weight}
            for e in h.hyperedges.values()
        ]
    else:
        doc["hyperedges"] = [{"id": e.id, "members": sorted(e.members), "weight": e.weight} for e in h.hyperedges.values()]
    return doc


def dumps_native(h) -> str:
    return json.dumps(to_native(h), sort_keys=True, indent=1, allow_nan=False) + "\n"


def from_native(doc: dict):
    if not isinstance(doc, dict) or doc.get("format") != NATIVE_FORMAT:
        raise IngestError(f"not a {NATIVE_FORMAT} document")
    if doc.get("version") != NATIVE_VERSION:
        raise IngestError(f"unsupported version {doc.get('version')!r}")
    try:
        nodes = [n["id"] for n in doc["nodes"]]
        labels = {n["id"]: n["label"] for n in doc["nodes"] if "label" in n}
        if doc["directed"]:
            edges = [DirectedHyperedge(e["id"], e["tail"], e["head"], float(e["weight"])) for e in doc["hyperedges"]]
            return DirectedHypergraph(nodes, edges, labels=labels, sink=doc.get("sink"))
        edges = [UndirectedHyperedge(e["id"], e["members"], float(e["weight"])) for e in doc["hyperedges"]]
        return UndirectedHypergraph(nodes, edges, labels=labels)
    except (KeyError, TypeError) as exc:
        raise IngestError(f"malformed native document: {exc!r}") from None


def loads_native(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed native document: {exc.msg}", exc.lineno, exc.colno) from None
    return from_native(doc)


def write_native(h, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_native(h))


def read_native(path):
    with open(path, encoding="utf-8") as fh:
        return loads_native(fh.read())
