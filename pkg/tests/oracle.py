"""Brute-force path oracle, written without touching the engine's rule code.

Sequences are grown one step at a time over *every* kind-compatible triple
and each candidate sequence is re-validated from scratch. Only invariants
that are prefix-closed are used for pruning, so the accepted set is exactly
the set of sequences satisfying every path invariant.
"""

from __future__ import annotations

PHASE = {
    "InitialAccess": 0, "Execution": 0,
    "Persistence": 1, "DefenceEvasion": 1, "Discovery": 1, "LateralMovement": 1,
    "Collection": 1, "CommandAndControl": 1,
    "Exfiltration": 2, "Impact": 2,
}


def neighbours(topology) -> dict[str, set[str]]:
    out = {a.id: set() for a in topology.assets}
    for e in topology.edges:
        out[e.a].add(e.b)
        out[e.b].add(e.a)
    return out


def triples(kb, topology) -> list[tuple[str, str, str]]:
    return [
        (t.id, tactic.value, a.id)
        for t in kb.techniques
        for tactic in t.tactics
        for a in topology.assets
        if a.kind in t.components
    ]


def prefix_ok(seq, kb, topology, nbr) -> bool:
    """All prefix-closed path invariants hold for ``seq``."""
    if len(set(seq)) != len(seq):
        return False
    foothold, channels = set(), set()
    last_phase = -1
    for i, (tid, tactic, target) in enumerate(seq):
        tech = kb[tid]
        asset = topology[target]
        if tactic not in {t.value for t in tech.tactics} or asset.kind not in tech.components:
            return False
        phase = PHASE[tactic]
        if i == 0 and tactic != "InitialAccess":
            return False
        if phase < last_phase:
            return False
        loc = tech.locality.value
        if loc == "Remote":
            if not {e.value for e in tech.required_exposure} <= {e.value for e in asset.exposures}:
                return False
            if last_phase > 0:
                return False
        elif loc == "Local":
            if target not in foothold:
                return False
        else:
            if target not in foothold and not (nbr[target] & foothold):
                return False
        if tactic == "Exfiltration" and not channels:
            return False
        effect = tech.effect_for(tech_tactic(tech, tactic)).value
        if effect in ("Foothold", "Channel"):
            foothold.add(target)
        if effect == "Channel":
            channels.add(target)
        last_phase = max(last_phase, phase)
    return True


def tech_tactic(tech, name: str):
    return next(t for t in tech.tactics if t.value == name)


def brute_force_paths(kb, topology, max_depth: int) -> set[tuple[tuple[str, str, str], ...]]:
    nbr = neighbours(topology)
    pool = triples(kb, topology)
    found = set()
    frontier = [()]
    for _ in range(max_depth):
        grown = []
        for prefix in frontier:
            for step in pool:
                seq = prefix + (step,)
                if prefix_ok(seq, kb, topology, nbr):
                    grown.append(seq)
                    if PHASE[step[1]] == 2:
                        found.add(seq)
        frontier = grown
    return found


def as_triples(paths) -> set[tuple[tuple[str, str, str], ...]]:
    return {
        tuple((s.technique_id, s.tactic_in_use.value, s.target) for s in p.steps)
        for p in paths
    }
