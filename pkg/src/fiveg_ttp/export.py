"""Analyst-facing serializations: Navigator layers, DOT graphs and text reports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .applicability import EntryPoint, entry_points
from .attackgraph import AttackGraph, SearchBounds, enumerate_paths, technique_cuts
from .kb import ComponentKind, KnowledgeBase, LintReport, lint_knowledge_base
from .risk import PathScore, path_score, rank_paths, technique_weights
from .topology import Topology

LAYER_DOMAIN = "5gcn-attack"
LAYER_VERSIONS = {"layer": "4.5", "navigator": "4.9.1"}
GRADIENT_COLORS = ["#ffffff", "#ff6666"]
EDITORIAL_COMMENT = "not in the published component mapping; components editorially supplied"


@dataclass(frozen=True)
class NavigatorLayer:
    name: str
    description: str
    techniques: tuple[dict, ...]
    min_score: int
    max_score: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "versions": dict(LAYER_VERSIONS),
            "domain": LAYER_DOMAIN,
            "description": self.description,
            "techniques": [dict(t) for t in self.techniques],
            "gradient": {
                "colors": list(GRADIENT_COLORS),
                "minValue": self.min_score,
                "maxValue": self.max_score,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def to_navigator_layer(kb: KnowledgeBase, weights: Mapping[str, int] | None = None,
                       selection: Iterable[str] | None = None,
                       name: str = "5GCN adversarial techniques") -> NavigatorLayer:
    """One layer entry per selected technique, ordered by id."""
    if weights is None:
        weights = technique_weights(kb)
    if selection is None:
        ids = sorted(kb.ids)
    else:
        ids = sorted(set(selection))
        unknown = [tid for tid in ids if tid not in kb]
        if unknown:
            raise KeyError(f"unknown technique(s) in selection: {', '.join(unknown)}")
    entries = []
    for tid in ids:
        tech = kb[tid]
        comment = "tactics: " + ", ".join(t.value for t in tech.sorted_tactics())
        if tech.components_editorial:
            comment += f"; {EDITORIAL_COMMENT}"
        entries.append({"techniqueID": tid, "score": weights[tid], "comment": comment})
    scores = [e["score"] for e in entries]
    return NavigatorLayer(
        name=name,
        description=f"knowledge base {kb.version}; score = number of tactics served",
        techniques=tuple(entries),
        min_score=min(scores, default=0),
        max_score=max(scores, default=0),
    )


# -- DOT ----------------------------------------------------------------------

ENTRY_SHAPE = "box"
OBJECTIVE_SHAPE = "doubleoctagon"
DEFAULT_SHAPE = "ellipse"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: AttackGraph, name: str = "attack_graph") -> str:
    ids = {node: f"n{i}" for i, node in enumerate(graph.nodes)}
    lines = [f"digraph {name} {{", "  rankdir=LR;", f"  node [shape={DEFAULT_SHAPE}];"]
    for node in graph.nodes:
        attrs = [f"label={_quote(node.label())}"]
        if node in graph.entries:
            attrs.append(f"shape={ENTRY_SHAPE}")
        elif node in graph.objectives:
            attrs.append(f"shape={OBJECTIVE_SHAPE}")
        lines.append(f"  {ids[node]} [{', '.join(attrs)}];")
    for u, v in graph.edges:
        lines.append(f"  {ids[u]} -> {ids[v]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- assessment report --------------------------------------------------------

@dataclass(frozen=True)
class Assessment:
    kb: KnowledgeBase
    topology: Topology
    bounds: SearchBounds
    lint: LintReport
    entry_points: tuple[EntryPoint, ...]
    top_paths: tuple[PathScore, ...]
    path_count: int
    truncated: bool
    cuts: tuple[frozenset[str], ...]
    max_cut_size: int


def assess(kb: KnowledgeBase, topology: Topology, bounds: SearchBounds = SearchBounds(),
           top_k: int = 5, max_cut_size: int = 2) -> Assessment:
    paths = enumerate_paths(kb, topology, bounds)
    weights = technique_weights(kb)
    ranked = rank_paths(path_score(kb, p, weights) for p in paths)
    return Assessment(
        kb=kb,
        topology=topology,
        bounds=bounds,
        lint=lint_knowledge_base(kb),
        entry_points=tuple(sorted(entry_points(kb, topology))),
        top_paths=tuple(ranked[:top_k]),
        path_count=len(paths),
        truncated=paths.truncated,
        cuts=tuple(technique_cuts(kb, topology, bounds, max_cut_size)),
        max_cut_size=max_cut_size,
    )


def to_report(bundle: Assessment) -> str:
    kb, lint = bundle.kb, bundle.lint
    out = [
        "5GCN threat assessment",
        f"topology: {bundle.topology.name} ({len(bundle.topology.assets)} assets, "
        f"{len(bundle.topology.edges)} edges)",
        f"knowledge base: {kb.version}",
        "",
        "== KB Summary ==",
    ]
    fp = lint.fingerprint
    out.append(f"techniques: {len(kb)} ({fp.technique_count} component-mapped)")
    out.append("column counts: " + " ".join(f"{k.value}={fp.column_counts[k]}" for k in ComponentKind))
    out.append("applicable to every kind: " + ", ".join(sorted(fp.all_kinds)))
    out.append(f"lint: {len(lint.errors)} errors, {len(lint.warnings)} warnings")
    for f in lint.findings:
        subject = f" {f.technique_id}" if f.technique_id else ""
        out.append(f"  [{f.severity.value}] {f.rule_id}{subject}: {f.message}")

    out += ["", "== Entry Points =="]
    if bundle.entry_points:
        out += [f"  {ep.asset_id} <- {ep.technique_id}" for ep in bundle.entry_points]
    else:
        out.append("Entry Points: none")

    out += ["", "== Top Paths (ranked) =="]
    note = f", truncated at max_paths={bundle.bounds.max_paths}" if bundle.truncated else ""
    out.append(f"enumerated {bundle.path_count} paths (max depth {bundle.bounds.max_depth}{note})")
    if bundle.top_paths:
        for rank, score in enumerate(bundle.top_paths, 1):
            out.append(f"  {rank}. total {score.total}, {score.length} steps")
            out.append("     " + " -> ".join(s.label() for s in score.path.steps))
    else:
        out.append("Top Paths: none")

    out += ["", "== Minimal Cuts =="]
    out.append(f"max cut size {bundle.max_cut_size}")
    if bundle.cuts == (frozenset(),):
        out.append("  {} (no path exists, nothing to cut)")
    elif bundle.cuts:
        for cut in bundle.cuts:
            out.append("  {" + ", ".join(sorted(cut)) + "}")
    else:
        out.append("Minimal Cuts: none within size bound")
    return "\n".join(out) + "\n"
