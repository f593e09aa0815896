"""Tactic-span technique weights and path ranking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .attackgraph import AttackPath
from .kb import KnowledgeBase


@dataclass(frozen=True)
class TechniqueWeight:
    technique_id: str
    weight: int


@dataclass(frozen=True)
class PathScore:
    path: AttackPath
    total: int
    length: int

    def to_dict(self) -> dict:
        return {"total": self.total, "length": self.length, **self.path.to_dict()}


def technique_weight(kb: KnowledgeBase, technique_id: str) -> TechniqueWeight:
    """Weight = number of tactics the technique can serve."""
    return TechniqueWeight(technique_id, len(kb[technique_id].tactics))


def technique_weights(kb: KnowledgeBase) -> dict[str, int]:
    return {t.id: len(t.tactics) for t in kb}


def path_score(kb: KnowledgeBase, path: AttackPath,
               weights: Mapping[str, int] | None = None) -> PathScore:
    # each distinct technique counts once, however often the path reuses it
    if weights is None:
        weights = technique_weights(kb)
    total = sum(weights[tid] for tid in path.technique_ids())
    return PathScore(path, total, len(path.steps))


def rank_paths(scores: Iterable[PathScore]) -> list[PathScore]:
    """Highest total first; ties go to the shorter path, then to step serialization."""
    return sorted(scores, key=lambda s: (-s.total, s.length, s.path.serialize()))
