"""Command-line front end.

Every command writes its outputs next to a ``*.manifest.json`` that records the
command, the input digests and the full configuration. Outputs never contain
timestamps or absolute paths, so re-running a manifest reproduces them byte
for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .counterexample import verify_negativity
from .flow import FlowConfig, run_flow
from .ingest import (
    dumps_native,
    filter_papers,
    first_order_stats,
    loads_native,
    papers_to_hypergraph,
    parse_bigg_model,
    parse_coauthor_csv,
    parse_reactions,
    reactions_to_hypergraph,
)
from .quality import (
    Centrality,
    CoreQualityReport,
    DistanceTable,
    evaluate_core,
    extract_cores,
    metric_names,
    validity_check,
)
from .significance import core_p_values, sample_baselines

log = logging.getLogger("hypercores")

THREADS_ENV = "HYPERCORES_THREADS"
REPORT_VERSION = 1


class CliError(Exception):
    pass


# -- small helpers -------------------------------------------------------------


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _manifest(out_path, command: str, inputs: dict, config: dict, outputs: list) -> None:
    doc = {
        "tool": "hypercores",
        "format_version": REPORT_VERSION,
        "command": command,
        "inputs": {k: {"name": Path(v).name, "sha256": _digest(v)} for k, v in sorted(inputs.items())},
        "config": config,
        "outputs": sorted(Path(p).name for p in outputs),
    }
    _write(str(out_path) + ".manifest.json", _dump(doc))


def _read_hypergraph(path):
    with open(path, encoding="utf-8") as fh:
        return loads_native(fh.read())


def _table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.3e}" if (x != 0 and abs(x) < 1e-3) else f"{x:.4f}"
    return str(x)


def _size_band(text: str):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo,hi (fractions of |V|)") from None
    if not 0 <= lo <= hi <= 1:
        raise argparse.ArgumentTypeError("need 0 <= lo <= hi <= 1")
    return lo, hi


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _flow_config(args) -> FlowConfig:
    return FlowConfig(
        eta=args.eta,
        tau=args.tau,
        delta=args.delta,
        kappa=args.kappa,
        epsilon=args.epsilon,
        alpha=args.alpha,
        seed=args.seed,
        threads=args.threads,
    )


# -- ingest --------------------------------------------------------------------


def cmd_ingest(args) -> int:
    text = Path(args.input).read_text(encoding="utf-8")
    extra = {}
    if args.kind == "native":
        h = loads_native(text)
    elif args.kind == "reactions":
        h = reactions_to_hypergraph(parse_reactions(text), reverse=args.reverse)
    elif args.kind == "bigg":
        h = reactions_to_hypergraph(parse_bigg_model(text, reverse=args.reverse))
    else:
        records = parse_coauthor_csv(text)
        kept, dropped = filter_papers(records, args.max_authors)
        extra = {"papers": len(records), "papers_dropped": len(dropped), "papers_kept": len(kept)}
        h = papers_to_hypergraph(records, args.max_authors)
    stats = first_order_stats(h)
    out = Path(args.out)
    _write(out, dumps_native(h))
    rows = stats.rows() + sorted(extra.items())
    if h.sink is not None:
        rows.append(("sink", h.sink))
    stats_doc = {"stats": asdict(stats), "extra": extra, "sink": h.sink}
    stats_json = str(out) + ".stats.json"
    stats_txt = str(out) + ".stats.txt"
    _write(stats_json, _dump(stats_doc))
    table = _table(["statistic", "value"], [(k, _fmt(v)) for k, v in rows])
    _write(stats_txt, table)
    config = {"kind": args.kind, "max_authors": args.max_authors, "reverse": args.reverse}
    _manifest(out, "ingest", {"input": args.input}, config, [out, stats_json, stats_txt])
    sys.stdout.write(table)
    return 0


# -- flow ----------------------------------------------------------------------


def cmd_flow(args) -> int:
    cfg = _flow_config(args)
    h = _read_hypergraph(args.input)
    final, trace = run_flow(h, cfg)
    out = Path(args.out_dir)
    trace_path, final_path = out / "trace.jsonl", out / "final.json"
    _write(trace_path, trace.to_lines())
    _write(final_path, dumps_native(final))
    summary = {
        "first_converged": trace.first_converged,
        "epsilon": trace.epsilon,
        "early_stop": trace.early_stop,
        "iterations": len(trace.records),
        "live_edges": len(final.hyperedges),
        "components": len(final.components()),
    }
    summary_path = out / "flow_summary.json"
    _write(summary_path, _dump(summary))
    _manifest(out / "flow", "flow", {"input": args.input}, asdict(cfg), [trace_path, final_path, summary_path])
    rows = [
        (r.index, _fmt(r.delta_ave), _fmt(r.delta_std), r.live_edges, len(r.pruned), " ".join(r.removed[:4]) + (" ..." if len(r.removed) > 4 else ""))
        for r in trace.records
    ]
    sys.stdout.write(_table(["iter", "delta_ave", "delta_std", "live", "pruned", "removed"], rows))
    first = trace.first_converged
    sys.stdout.write(f"first iteration with delta_ave <= {trace.epsilon:g}: {first if first is not None else 'none'}\n")
    return 0


# -- cores ---------------------------------------------------------------------


def _report_rows(directed, cores):
    names = metric_names(directed)
    header = ["core_#", "core_size"] + list(names)
    has_p = any(c.get("p_values") for c in cores)
    if has_p:
        header += [f"p({n})" for n in names]
    header += ["valid"]
    rows = []
    for c in cores:
        row = [c["core"], c["size"]] + [_fmt(c["metrics"][n]) for n in names]
        if has_p:
            row += [_fmt(c["p_values"].get(n)) for n in names]
        row += ["yes" if c["valid"] else "no"]
        rows.append(row)
    return header, rows


def _render_report(doc) -> str:
    lines = [f"# {doc['diagnostic']}\n"]
    if doc["cores"]:
        header, rows = _report_rows(doc["directed"], doc["cores"])
        lines.append(_table(header, rows))
        for c in doc["cores"]:
            if c["reasons"]:
                lines.append(f"core {c['core']}: " + "; ".join(c["reasons"]) + "\n")
            if c["stretch_undefined"]:
                lines.append(f"core {c['core']}: no pair stays connected, stretch reported as 1.0\n")
    return "".join(lines)


def _emit_report(out, doc):
    json_path, txt_path = Path(out), Path(str(out) + ".txt")
    _write(json_path, _dump(doc))
    text = _render_report(doc)
    _write(txt_path, text)
    sys.stdout.write(text)
    return [json_path, txt_path]


def cmd_cores(args) -> int:
    final = _read_hypergraph(args.final)
    original = _read_hypergraph(args.original)
    if final.directed != original.directed or set(final.nodes) != set(original.nodes):
        raise CliError("final and original hypergraphs do not share a node universe")
    cores = extract_cores(final, original, args.kappa, args.size_band)
    table = DistanceTable(original)
    all_nodes = [c.nodes for c in cores]
    entries = []
    for i, core in enumerate(cores, 1):
        rep = evaluate_core(original, all_nodes, core.nodes, table)
        validity_check(rep)
        entry = rep.to_dict()
        entry["core"] = i
        entries.append(entry)
    doc = {
        "format": "hypercores-cores",
        "version": REPORT_VERSION,
        "directed": original.directed,
        "kappa": args.kappa,
        "size_band": list(args.size_band),
        "diagnostic": cores.diagnostic,
        "cores": entries,
    }
    outputs = _emit_report(args.out, doc)
    config = {"kappa": args.kappa, "size_band": list(args.size_band)}
    _manifest(args.out, "cores", {"final": args.final, "original": args.original}, config, outputs)
    return 0


def _report_from_entry(entry, directed):
    c = Centrality(
        entry["metrics"]["disconnected"],
        entry["metrics"]["stretch"],
        entry["zeta"],
        entry["xi"],
        entry["never_connected"],
        0,
        entry["stretch_undefined"],
    )
    return CoreQualityReport(tuple(entry["nodes"]), directed, dict(entry["metrics"]), c)


def cmd_pvalue(args) -> int:
    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    if doc.get("format") != "hypercores-cores":
        raise CliError(f"{args.report} is not a core report")
    h = _read_hypergraph(args.hypergraph)
    if h.directed != doc["directed"]:
        raise CliError("report and hypergraph disagree on directedness")
    table = DistanceTable(h)
    for entry in doc["cores"]:
        rep = _report_from_entry(entry, h.directed)
        baselines = sample_baselines(h, rep.size, args.count, (args.seed, entry["core"]), table)
        vec = core_p_values(h, rep, baselines)
        verdict = validity_check(rep)
        entry["p_values"] = {k: (None if math.isnan(v) else v) for k, v in vec.p.items()}
        entry["t_statistics"] = {k: (None if not math.isfinite(v) else v) for k, v in vec.t.items()}
        entry["baselines_used"] = dict(vec.used)
        entry["valid"] = verdict.valid
        entry["reasons"] = list(verdict.reasons)
    doc["baseline_count"] = args.count
    doc["seed"] = args.seed
    outputs = _emit_report(args.out, doc)
    config = {"count": args.count, "seed": args.seed}
    _manifest(args.out, "pvalue", {"report": args.report, "hypergraph": args.hypergraph}, config, outputs)
    return 0


# -- theorem1 ------------------------------------------------------------------


def cmd_theorem1(args) -> int:
    rep = verify_negativity(args.q, args.k, args.s)
    s = rep.summary()
    rows = [
        ("q", s["q"]),
        ("k", s["k"]),
        ("step size s", _fmt(s["s_step"])),
        ("nodes", s["nodes"]),
        ("edges m", s["m"]),
        ("C(f)", _fmt(s["C_f"])),
        ("sum of curvatures", _fmt(s["sum_C"])),
        ("mean curvature", _fmt(s["mean_C"])),
        ("TVD(f)", _fmt(s["tvd_f"])),
        ("w1(f) = 1 - C(f) + (s/m) sum C", _fmt(s["w1_f"])),
        ("literal normalized step at f", _fmt(s["literal_w1_f"])),
        ("min edge", s["min_edge"]),
        ("min edge weight", _fmt(s["min_weight"])),
        ("w1(f) < 0", "yes" if s["negative"] else "no"),
    ]
    rows += [(f"curvature {cls}", str(v)) for cls, v in s["class_curvatures"].items()]
    rows += [(f"check {name}", "pass" if ok else "FAIL") for name, ok in s["checks"].items()]
    text = _table(["quantity", "value"], rows)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, _dump(s))
        _write(str(args.out) + ".txt", text)
        _manifest(args.out, "theorem1", {}, {"q": args.q, "k": args.k, "s": args.s}, [args.out, str(args.out) + ".txt"])
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypercores", description="Ricci-flow core detection in hypergraphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    ing = sub.add_parser("ingest", help="build a native hypergraph file from raw data")
    ing.add_argument("input")
    ing.add_argument("--kind", choices=["native", "reactions", "bigg", "coauthors"], required=True)
    ing.add_argument("--out", required=True, help="native hypergraph output path")
    ing.add_argument("--max-authors", type=int, default=15, help="drop papers with at least this many authors")
    ing.add_argument("--reverse", action="store_true", help="add reversed hyperedges for reversible reactions")
    ing.set_defaults(func=cmd_ingest)

    fl = sub.add_parser("flow", help="run the Ricci flow with surgery")
    fl.add_argument("input")
    fl.add_argument("--out-dir", required=True)
    d = FlowConfig()
    fl.add_argument("--eta", type=int, default=d.eta, help="number of iterations")
    fl.add_argument("--tau", type=int, default=d.tau, help="surgery period")
    fl.add_argument("--delta", type=float, default=d.delta, help="percent of hyperedges cut per surgery")
    fl.add_argument("--kappa", type=int, default=d.kappa)
    fl.add_argument("--epsilon", type=float, default=None, help="convergence threshold on delta_ave")
    fl.add_argument("--alpha", type=float, default=d.alpha, help="laziness of undirected distributions")
    fl.add_argument("--seed", type=int, default=d.seed)
    fl.add_argument("--threads", type=int, default=None)
    fl.set_defaults(func=cmd_flow)

    co = sub.add_parser("cores", help="extract and score cores")
    co.add_argument("final")
    co.add_argument("original")
    co.add_argument("--kappa", type=int, default=2)
    co.add_argument("--size-band", type=_size_band, default=(0.01, 0.5))
    co.add_argument("--out", required=True)
    co.set_defaults(func=cmd_cores)

    pv = sub.add_parser("pvalue", help="add p-values against random subsets")
    pv.add_argument("report")
    pv.add_argument("hypergraph")
    pv.add_argument("--count", type=int, default=100)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--out", required=True)
    pv.set_defaults(func=cmd_pvalue)

    th = sub.add_parser("theorem1", help="negative first step of the sum-normalized flow")
    th.add_argument("--q", type=int, default=40)
    th.add_argument("--k", type=int, default=3)
    th.add_argument("--s", type=float, default=1.0)
    th.add_argument("--out", default=None)
    th.set_defaults(func=cmd_theorem1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "threads", 1) is None:
            args.threads = _default_threads()
        return args.func(args)
    # every library error derives from ValueError
    except (CliError, ValueError, OSError) as exc:
        sys.stderr.write(f"hypercores {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
