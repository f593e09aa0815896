"""Typed 5GCN deployments: assets, relationship edges and the reference fixture."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable

from .kb import ComponentKind, Exposure

__all__ = [
    "Asset", "Edge", "Exposure", "Relation", "Topology", "TopologyError",
    "adjacency", "load_reference", "parse_topology", "serialize_topology",
]


class Relation(str, Enum):
    INTERFACE = "Interface"
    TRUST = "Trust"
    HOSTED_ON = "HostedOn"
    SLICE_SHARED = "SliceShared"


# Software kinds sit on virtual infrastructure, which sits on hardware.
_LAYER = {
    ComponentKind.NF: 2,
    ComponentKind.SDN: 2,
    ComponentKind.MANO: 2,
    ComponentKind.VIRTUAL: 1,
    ComponentKind.PHYSICAL: 0,
}


class TopologyError(ValueError):
    pass


class TopologySyntaxError(TopologyError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Asset:
    id: str
    kind: ComponentKind
    label: str | None = None
    exposures: frozenset[Exposure] = frozenset()
    slices: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    relation: Relation


@dataclass(frozen=True)
class Topology:
    name: str
    assets: tuple[Asset, ...]
    edges: tuple[Edge, ...]
    _index: dict[str, Asset] = field(init=False, repr=False, compare=False)
    _adj: dict[str, frozenset[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, Asset] = {}
        for asset in self.assets:
            if asset.id in index:
                raise TopologyError(f"duplicate asset id {asset.id!r}")
            if asset.kind is ComponentKind.NETWORK_SLICE and asset.slices:
                raise TopologyError(f"slice asset {asset.id!r} cannot itself serve slices")
            index[asset.id] = asset

        adj: dict[str, set[str]] = {a.id: set() for a in self.assets}
        seen = set()
        hosted: dict[str, list[str]] = {}
        for edge in self.edges:
            for end in (edge.a, edge.b):
                if end not in index:
                    raise TopologyError(f"edge {edge.a}-{edge.b} references unknown asset {end!r}")
            if edge.a == edge.b:
                raise TopologyError(f"self-loop edge on {edge.a!r}")
            if edge in seen:
                raise TopologyError(f"duplicate edge {edge.a}-{edge.b} ({edge.relation.value})")
            seen.add(edge)
            adj[edge.a].add(edge.b)
            adj[edge.b].add(edge.a)
            if edge.relation is Relation.HOSTED_ON:
                hosted.setdefault(edge.a, []).append(edge.b)

        _check_hosting(index, hosted)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_adj", {k: frozenset(v) for k, v in adj.items()})

    def __contains__(self, asset_id: object) -> bool:
        return asset_id in self._index

    def __getitem__(self, asset_id: str) -> Asset:
        try:
            return self._index[asset_id]
        except KeyError:
            raise KeyError(f"unknown asset {asset_id!r}") from None

    def get(self, asset_id: str) -> Asset | None:
        return self._index.get(asset_id)

    @property
    def asset_ids(self) -> list[str]:
        return [a.id for a in self.assets]

    def neighbours(self, asset_id: str) -> frozenset[str]:
        if asset_id not in self._adj:
            raise KeyError(f"unknown asset {asset_id!r}")
        return self._adj[asset_id]


def _check_hosting(index: dict[str, Asset], hosted: dict[str, list[str]]) -> None:
    state: dict[str, int] = {}

    def visit(node: str, trail: list[str]) -> None:
        state[node] = 1
        for nxt in hosted.get(node, ()):
            if state.get(nxt) == 1:
                cycle = trail[trail.index(nxt):] + [nxt] if nxt in trail else [node, nxt]
                raise TopologyError(f"HostedOn cycle: {' -> '.join(cycle)}")
            if nxt not in state:
                visit(nxt, trail + [nxt])
        state[node] = 2

    for node in sorted(hosted):
        if node not in state:
            visit(node, [node])

    for upper, lowers in hosted.items():
        for lower in lowers:
            ka, kb = index[upper].kind, index[lower].kind
            if ka not in _LAYER or kb not in _LAYER or _LAYER[ka] <= _LAYER[kb]:
                raise TopologyError(
                    f"layer violation: {upper} ({ka.value}) HostedOn {lower} ({kb.value})"
                )


def adjacency(topology: Topology, asset_id: str) -> frozenset[str]:
    """Undirected neighbourhood over every relation, HostedOn in both directions."""
    return topology.neighbours(asset_id)


def _enum_set(enum_cls, raw, what: str, owner: str) -> frozenset:
    if not isinstance(raw, list):
        raise TopologyError(f"{owner}: {what} must be an array")
    try:
        return frozenset(enum_cls(v) for v in raw)
    except ValueError as exc:
        raise TopologyError(f"{owner}: unknown {what} ({exc})") from None


def _asset(rec) -> Asset:
    if not isinstance(rec, dict) or not isinstance(rec.get("id"), str):
        raise TopologyError("asset record needs a string id")
    aid = rec["id"]
    try:
        kind = ComponentKind(rec.get("kind"))
    except ValueError:
        raise TopologyError(f"asset {aid!r}: unknown kind {rec.get('kind')!r}") from None
    slices = rec.get("slices", [])
    if not isinstance(slices, list) or not all(isinstance(s, str) for s in slices):
        raise TopologyError(f"asset {aid!r}: slices must be an array of ids")
    return Asset(
        id=aid,
        kind=kind,
        label=rec.get("label"),
        exposures=_enum_set(Exposure, rec.get("exposures", []), "exposure", f"asset {aid!r}"),
        slices=frozenset(slices),
    )


def _edge(rec) -> Edge:
    if not isinstance(rec, dict) or not all(isinstance(rec.get(k), str) for k in ("a", "b")):
        raise TopologyError("edge record needs string endpoints a and b")
    try:
        relation = Relation(rec.get("relation"))
    except ValueError:
        raise TopologyError(f"edge {rec['a']}-{rec['b']}: unknown relation {rec.get('relation')!r}") from None
    return Edge(rec["a"], rec["b"], relation)


def parse_topology(text: str) -> Topology:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologySyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise TopologyError("top level must be an object")
    assets, edges = doc.get("assets", []), doc.get("edges", [])
    if not isinstance(assets, list) or not isinstance(edges, list):
        raise TopologyError('"assets" and "edges" must be arrays')
    return Topology(
        name=str(doc.get("name", "")),
        assets=tuple(_asset(r) for r in assets),
        edges=tuple(_edge(r) for r in edges),
    )


def _ordered(values: Iterable[Enum], enum_cls) -> list[str]:
    present = set(values)
    return [v.value for v in enum_cls if v in present]


def serialize_topology(topology: Topology) -> str:
    assets = []
    for asset in topology.assets:
        rec: dict = {"id": asset.id, "kind": asset.kind.value}
        if asset.label is not None:
            rec["label"] = asset.label
        rec["exposures"] = _ordered(asset.exposures, Exposure)
        rec["slices"] = sorted(asset.slices)
        assets.append(rec)
    doc = {
        "name": topology.name,
        "assets": assets,
        "edges": [{"a": e.a, "b": e.b, "relation": e.relation.value} for e in topology.edges],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def reference_text() -> str:
    return resources.files("fiveg_ttp").joinpath("data/ref5gcn.json").read_text(encoding="utf-8")


def load_reference() -> Topology:
    """The ``ref5gcn`` fixture: a minimal core with every component kind."""
    return parse_topology(reference_text())
