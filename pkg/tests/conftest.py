from __future__ import annotations

import dataclasses
import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fiveg_ttp.kb import (  # noqa: E402
    ComponentKind, Exposure, KnowledgeBase, Tactic, load_seed, parse_knowledge_base,
)
from fiveg_ttp.topology import load_reference, parse_topology, serialize_topology  # noqa: E402

# Small knowledge base exercising every locality, effect override and gate.
TOY_KB = {
    "version": "toy-1",
    "techniques": [
        {"id": "entry-api", "name": "Entry API", "tactics": ["InitialAccess"], "components": ["NF"],
         "provenance": "New5G", "effect": "Foothold", "locality": "Remote",
         "required_exposure": ["PublicFacing"]},
        {"id": "entry-creds", "name": "Entry Creds", "tactics": ["InitialAccess"],
         "components": ["MANO", "Virtual"], "provenance": "New5G", "effect": "Foothold",
         "locality": "Remote", "required_exposure": ["ExternalRemoteService"]},
        {"id": "run-local", "name": "Run Local", "tactics": ["Execution"], "components": ["NF", "MANO"],
         "provenance": "New5G", "effect": "Foothold", "locality": "Local"},
        {"id": "hop", "name": "Hop", "tactics": ["Discovery", "LateralMovement"],
         "components": ["NF", "Virtual", "Physical"], "provenance": "New5G", "effect": "Foothold",
         "effect_by_tactic": {"Discovery": "Knowledge"}, "locality": "Adjacent"},
        {"id": "beacon", "name": "Beacon", "tactics": ["CommandAndControl"],
         "components": ["NF", "Virtual", "MANO"], "provenance": "New5G", "effect": "Channel",
         "locality": "Local"},
        {"id": "steal", "name": "Steal", "tactics": ["Exfiltration"], "components": ["NF", "MANO"],
         "provenance": "New5G", "effect": "Outcome", "locality": "Local"},
        {"id": "break", "name": "Break", "tactics": ["Impact"],
         "components": ["Physical", "NetworkSlice", "SDN", "Virtual"], "provenance": "New5G",
         "effect": "Outcome", "locality": "Adjacent"},
    ],
}

_LAYER = {ComponentKind.NF: 2, ComponentKind.SDN: 2, ComponentKind.MANO: 2,
          ComponentKind.VIRTUAL: 1, ComponentKind.PHYSICAL: 0}


@pytest.fixture(scope="session")
def seed_kb():
    return load_seed()


@pytest.fixture(scope="session")
def ref():
    return load_reference()


@pytest.fixture(scope="session")
def toy_kb():
    return parse_knowledge_base(json.dumps(TOY_KB))


def random_topology_doc(rng: random.Random, max_assets: int = 4, edge_p: float = 0.5) -> dict:
    kinds = list(ComponentKind)
    n = rng.randint(1, max_assets)
    assets = []
    for i in range(n):
        kind = rng.choice(kinds)
        exposures = [e.value for e in Exposure if rng.random() < 0.3]
        assets.append({"id": f"a{i}", "kind": kind.value, "exposures": exposures, "slices": []})
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() >= edge_p:
                continue
            ki, kj = ComponentKind(assets[i]["kind"]), ComponentKind(assets[j]["kind"])
            relation = rng.choice(["Interface", "Trust", "SliceShared", "HostedOn"])
            a, b = f"a{i}", f"a{j}"
            if relation == "HostedOn":
                if ki in _LAYER and kj in _LAYER and _LAYER[ki] != _LAYER[kj]:
                    if _LAYER[ki] < _LAYER[kj]:
                        a, b = b, a
                else:
                    relation = "Interface"
            edges.append({"a": a, "b": b, "relation": relation})
    return {"name": "random", "assets": assets, "edges": edges}


def random_topology(rng: random.Random, **kw):
    return parse_topology(json.dumps(random_topology_doc(rng, **kw)))


def restrict_to_scenario(kb, topology, spec):
    """Sub-KB and sub-topology holding only what the scenario touches.

    Every step legal here is legal in the full inputs (fewer tactics, assets
    and edges only remove options), so any path found here is a full path too.
    """
    used: dict[str, set] = {}
    for step in spec.steps:
        used.setdefault(step.technique_id, set()).add(Tactic(step.tactic_in_use))
    keep = set(used) | {kb[t].parent for t in used if kb[t].parent}

    def trim(tech):
        tactics = frozenset(used.get(tech.id) or tech.tactics)
        return dataclasses.replace(
            tech,
            tactics=tactics,
            effect_by_tactic={k: v for k, v in tech.effect_by_tactic.items() if k in tactics},
            inferred_tactics=tech.inferred_tactics & tactics,
        )

    sub_kb = KnowledgeBase(kb.version, tuple(trim(t) for t in kb if t.id in keep))
    assets = {s.target_asset_id for s in spec.steps}
    doc = json.loads(serialize_topology(topology))
    doc["assets"] = [a for a in doc["assets"] if a["id"] in assets]
    for a in doc["assets"]:
        a["slices"] = [s for s in a["slices"] if s in assets]
    doc["edges"] = [e for e in doc["edges"] if e["a"] in assets and e["b"] in assets]
    return sub_kb, parse_topology(json.dumps(doc))


# Acceptance verdicts, filled in by test_acceptance and echoed after the run.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}: {detail}")
