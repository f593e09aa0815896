"""Technique-to-asset applicability and viable network entry points."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .kb import KnowledgeBase, Tactic, Technique
from .topology import Asset, Topology


@dataclass(frozen=True, order=True)
class EntryPoint:
    asset_id: str
    technique_id: str


@dataclass(frozen=True)
class ApplicabilityMatrix:
    technique_ids: tuple[str, ...]
    asset_ids: tuple[str, ...]
    cells: tuple[tuple[bool, ...], ...]

    def cell(self, technique_id: str, asset_id: str) -> bool:
        return self.cells[self.technique_ids.index(technique_id)][self.asset_ids.index(asset_id)]

    def row(self, technique_id: str) -> dict[str, bool]:
        return dict(zip(self.asset_ids, self.cells[self.technique_ids.index(technique_id)]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["technique", *self.asset_ids])
        for tid, row in zip(self.technique_ids, self.cells):
            writer.writerow([tid, *("1" if c else "0" for c in row)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "assets": list(self.asset_ids),
            "rows": {
                tid: [a for a, c in zip(self.asset_ids, row) if c]
                for tid, row in zip(self.technique_ids, self.cells)
            },
        }


def applies(technique: Technique, asset: Asset) -> bool:
    return asset.kind in technique.components


def applicable_techniques(kb: KnowledgeBase, asset: Asset) -> set[str]:
    """Technique ids whose component kinds include the asset's kind.

    Exposure does not matter here; it only gates entry points.
    """
    return {t.id for t in kb if applies(t, asset)}


def is_entry(technique: Technique, asset: Asset) -> bool:
    return (
        Tactic.INITIAL_ACCESS in technique.tactics
        and applies(technique, asset)
        and technique.required_exposure <= asset.exposures
    )


def entry_points(kb: KnowledgeBase, topology: Topology) -> set[EntryPoint]:
    return {
        EntryPoint(asset.id, tech.id)
        for tech in kb
        for asset in topology.assets
        if is_entry(tech, asset)
    }


def applicability_matrix(kb: KnowledgeBase, topology: Topology) -> ApplicabilityMatrix:
    return ApplicabilityMatrix(
        technique_ids=tuple(kb.ids),
        asset_ids=tuple(topology.asset_ids),
        cells=tuple(tuple(applies(t, a) for a in topology.assets) for t in kb),
    )
