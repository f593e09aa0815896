"""Adversarial TTP knowledge base and attack-path analysis for 5G core networks."""

__version__ = "0.1.0"

from ._engine import BACKEND
from .applicability import applicability_matrix, applicable_techniques, entry_points
from .attackgraph import (
    AttackGraph, AttackPath, AttackStep, IntrusionState, SearchBounds,
    build_graph, enumerate_paths, successors, technique_cuts,
)
from .kb import (
    KnowledgeBase, Tactic, Technique, lint_knowledge_base, load_seed, parse_knowledge_base,
)
from .risk import path_score, rank_paths, technique_weight
from .scenario import parse_scenario, validate_scenario
from .topology import Topology, adjacency, load_reference, parse_topology
