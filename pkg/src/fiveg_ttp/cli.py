"""Command-line entry point.

Exit status: 0 success, 1 semantic failure (lint errors, failed scenario),
2 input errors (unreadable or malformed files, bad flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .applicability import applicability_matrix, entry_points
from .attackgraph import (
    AttackPath, SearchBounds, build_graph, enumerate_paths, technique_cuts,
)
from .export import assess, to_dot, to_navigator_layer, to_report
from .kb import KBError, KBSyntaxError, lint_text, parse_knowledge_base, seed_text
from .risk import path_score, rank_paths, technique_weights
from .scenario import ScenarioError, builtin_text, parse_scenario, validate_scenario
from .topology import TopologyError, parse_topology, reference_text

COMMANDS = (
    "lint-kb", "matrix", "entry-points", "paths", "cuts",
    "validate-scenario", "export-layer", "export-dot", "report",
)


class InputError(Exception):
    pass


def _read(source: str, builtins: dict) -> str:
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in builtins:
            raise InputError(f"unknown builtin {source!r}; choose from {', '.join(sorted(builtins))}")
        return builtins[name]()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None


def _kb_text(args) -> str:
    return _read(args.kb, {"seed": seed_text})


def _load_kb(args):
    try:
        return parse_knowledge_base(_kb_text(args))
    except KBError as exc:
        raise InputError(f"knowledge base {args.kb}: {exc}") from None


def _load_topology(args):
    try:
        return parse_topology(_read(args.topology, {"ref5gcn": reference_text}))
    except TopologyError as exc:
        raise InputError(f"topology {args.topology}: {exc}") from None


def _load_scenario(args):
    if not args.scenario:
        raise InputError("--scenario is required for this command")
    builtins = {n: (lambda n=n: builtin_text(n)) for n in ("scenario-1", "scenario-2")}
    try:
        return parse_scenario(_read(args.scenario, builtins))
    except ScenarioError as exc:
        raise InputError(f"scenario {args.scenario}: {exc}") from None


def _bounds(args) -> SearchBounds:
    try:
        return SearchBounds(args.max_depth, args.max_paths)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _path_lines(paths: list[AttackPath]) -> list[str]:
    return [" -> ".join(s.label() for s in p.steps) for p in paths]


# -- commands: each returns (text, exit status) --------------------------------

def cmd_lint_kb(args):
    try:
        report = lint_text(_kb_text(args))
    except KBSyntaxError as exc:
        raise InputError(f"knowledge base {args.kb}: {exc}") from None
    status = 0 if report.ok else 1
    if args.format == "json":
        return _dump(report.to_dict()), status
    lines = [f"{'OK' if report.ok else 'ERRORS'}: {len(report.errors)} errors, {len(report.warnings)} warnings"]
    if report.fingerprint:
        fp = report.fingerprint.to_dict()
        lines.append(f"component-mapped techniques: {fp['technique_count']}")
        lines.append("column counts: " + " ".join(f"{k}={v}" for k, v in fp["column_counts"].items()))
        lines.append("applicable to every kind: " + ", ".join(fp["all_kinds"]))
    for f in report.findings:
        subject = f" {f.technique_id}" if f.technique_id else ""
        lines.append(f"[{f.severity.value}] {f.rule_id}{subject}: {f.message}")
    return "\n".join(lines) + "\n", status


def cmd_matrix(args):
    matrix = applicability_matrix(_load_kb(args), _load_topology(args))
    if args.format == "json":
        return _dump(matrix.to_dict()), 0
    if args.format == "text":
        width = max((len(t) for t in matrix.technique_ids), default=0)
        lines = [" " * width + "  " + " ".join(matrix.asset_ids)]
        for tid, row in zip(matrix.technique_ids, matrix.cells):
            cells = " ".join(("x" if c else ".").center(len(a)) for a, c in zip(matrix.asset_ids, row))
            lines.append(f"{tid.ljust(width)}  {cells}")
        return "\n".join(lines) + "\n", 0
    return matrix.to_csv(), 0


def cmd_entry_points(args):
    eps = sorted(entry_points(_load_kb(args), _load_topology(args)))
    if args.format == "json":
        return _dump([{"asset": e.asset_id, "technique": e.technique_id} for e in eps]), 0
    return "".join(f"{e.asset_id}\t{e.technique_id}\n" for e in eps), 0


def cmd_paths(args):
    kb, topology = _load_kb(args), _load_topology(args)
    paths = enumerate_paths(kb, topology, _bounds(args), objective_filter=args.objective or None)
    if args.format == "json":
        weights = technique_weights(kb)
        return _dump({
            "truncated": paths.truncated,
            "count": len(paths),
            "paths": [
                {"score": path_score(kb, p, weights).total, **p.to_dict()} for p in paths
            ],
        }), 0
    lines = _path_lines(list(paths))
    if paths.truncated:
        lines.append(f"# truncated at {args.max_paths} paths")
    return "\n".join(lines) + "\n", 0


def cmd_cuts(args):
    cuts = technique_cuts(_load_kb(args), _load_topology(args), _bounds(args), args.max_cut_size)
    if args.format == "json":
        return _dump({"max_cut_size": args.max_cut_size, "cuts": [sorted(c) for c in cuts]}), 0
    if not cuts:
        return f"# no cut of size <= {args.max_cut_size}\n", 0
    return "".join("{" + ", ".join(sorted(c)) + "}\n" for c in cuts), 0


def cmd_validate_scenario(args):
    spec = _load_scenario(args)
    report = validate_scenario(spec, _load_kb(args), _load_topology(args))
    text = _dump(report.to_dict()) if args.format == "json" else report.to_text()
    return text, 0 if report.overall else 1


def cmd_export_layer(args):
    kb = _load_kb(args)
    selection = None
    if args.scenario:
        selection = {s.technique_id for s in _load_scenario(args).steps}
    try:
        layer = to_navigator_layer(kb, technique_weights(kb), selection)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    return layer.to_json(), 0


def cmd_export_dot(args):
    kb, topology = _load_kb(args), _load_topology(args)
    if args.scenario:
        report = validate_scenario(_load_scenario(args), kb, topology)
        if not report.overall:
            return report.to_text(), 1
        graph = build_graph([report.path])
    else:
        graph = build_graph(enumerate_paths(kb, topology, _bounds(args)))
    if args.format == "json":
        return _dump(graph.to_dict()), 0
    return to_dot(graph), 0


def cmd_report(args):
    bundle = assess(_load_kb(args), _load_topology(args), _bounds(args),
                    top_k=args.top, max_cut_size=args.max_cut_size)
    if args.format != "json":
        return to_report(bundle), 0
    return _dump({
        "topology": bundle.topology.name,
        "kb_version": bundle.kb.version,
        "lint": bundle.lint.to_dict(),
        "entry_points": [{"asset": e.asset_id, "technique": e.technique_id} for e in bundle.entry_points],
        "path_count": bundle.path_count,
        "truncated": bundle.truncated,
        "top_paths": [s.to_dict() for s in rank_paths(bundle.top_paths)],
        "max_cut_size": bundle.max_cut_size,
        "cuts": [sorted(c) for c in bundle.cuts],
    }), 0


HANDLERS = {
    "lint-kb": cmd_lint_kb,
    "matrix": cmd_matrix,
    "entry-points": cmd_entry_points,
    "paths": cmd_paths,
    "cuts": cmd_cuts,
    "validate-scenario": cmd_validate_scenario,
    "export-layer": cmd_export_layer,
    "export-dot": cmd_export_dot,
    "report": cmd_report,
}

DEFAULT_FORMAT = {"matrix": "csv", "export-dot": "dot", "export-layer": "json"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb", default="builtin:seed", help="KB file or builtin:seed")
    common.add_argument("--topology", default="builtin:ref5gcn", help="topology file or builtin:ref5gcn")
    common.add_argument("--scenario", help="scenario file, builtin:scenario-1 or builtin:scenario-2")
    common.add_argument("--max-depth", type=int, default=SearchBounds.max_depth)
    common.add_argument("--max-paths", type=int, default=SearchBounds.max_paths)
    common.add_argument("--max-cut-size", type=int, default=2)
    common.add_argument("--format", choices=["json", "text", "csv", "dot"])
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="fiveg-ttp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=HANDLERS[name].__name__[4:].replace("_", " "))
        if name == "paths":
            p.add_argument("--objective", action="append",
                           help="only emit paths ending in this technique (repeatable)")
        if name == "report":
            p.add_argument("--top", type=int, default=5, help="number of ranked paths to list")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = DEFAULT_FORMAT.get(args.command, "text")
    try:
        text, status = HANDLERS[args.command](args)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)
    except InputError as exc:
        print(f"fiveg-ttp: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fiveg-ttp: error: {exc}", file=sys.stderr)
        return 2
    if status == 1:
        print(f"fiveg-ttp: {args.command} reported failures", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
