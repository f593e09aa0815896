"""Multi-stage attack paths: step legality, enumeration, graphs and technique cuts.

Reachability model. An intrusion state tracks footholds (controlled assets),
knowledge (assets the attacker has learned about), channels (footholds with
an open C2 channel) and the furthest lifecycle phase reached. A step
``(technique, tactic, target)`` is legal when

* the tactic belongs to the technique and the target's kind to its components;
* the path is empty only if the tactic is InitialAccess;
* the tactic's phase is not earlier than the phase already reached;
* Remote techniques: the target carries every required exposure and the
  phase reached is still Pre;
* Local techniques: the target is a foothold;
* Adjacent techniques: the target is a foothold or neighbours one;
* Exfiltration: at least one channel is open.

Effects: Foothold adds the target to footholds, Knowledge to knowledge,
Channel to both channels and footholds, Outcome changes nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from . import _engine, _pykernel
from .applicability import EntryPoint, is_entry
from .kb import Effect, KnowledgeBase, Locality, Phase, Tactic
from .topology import Topology


@dataclass(frozen=True, order=True)
class AttackStep:
    technique_id: str
    tactic_in_use: Tactic
    target: str

    def to_dict(self) -> dict:
        return {"technique": self.technique_id, "tactic": self.tactic_in_use.value, "target": self.target}

    @classmethod
    def from_dict(cls, rec: dict) -> AttackStep:
        return cls(rec["technique"], Tactic(rec["tactic"]), rec["target"])

    def label(self) -> str:
        return f"{self.technique_id} @ {self.target} [{self.tactic_in_use.value}]"

    def sort_key(self) -> tuple:
        return (self.technique_id, self.target, self.tactic_in_use.rank)


@dataclass(frozen=True)
class IntrusionState:
    foothold: frozenset[str] = frozenset()
    knowledge: frozenset[str] = frozenset()
    channels: frozenset[str] = frozenset()
    phase_reached: Phase = Phase.PRE

    @property
    def empty(self) -> bool:
        return not self.foothold

    def to_dict(self) -> dict:
        return {
            "foothold": sorted(self.foothold),
            "knowledge": sorted(self.knowledge),
            "channels": sorted(self.channels),
            "phase_reached": self.phase_reached.name.title(),
        }


EMPTY_STATE = IntrusionState()


@dataclass(frozen=True)
class AttackPath:
    steps: tuple[AttackStep, ...]
    final_state: IntrusionState

    def __len__(self) -> int:
        return len(self.steps)

    def technique_ids(self) -> set[str]:
        return {s.technique_id for s in self.steps}

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps]}

    def serialize(self) -> str:
        return json.dumps([s.to_dict() for s in self.steps], separators=(",", ":"))


@dataclass(frozen=True)
class SearchBounds:
    max_depth: int = 8
    max_paths: int = 10000

    def __post_init__(self) -> None:
        if self.max_depth < 1 or self.max_paths < 1:
            raise ValueError("search bounds must be positive integers")


@dataclass(frozen=True)
class PathSet:
    """Enumeration result; ``truncated`` is set when max_paths cut the search short."""

    paths: tuple[AttackPath, ...]
    truncated: bool = False

    def __iter__(self) -> Iterator[AttackPath]:
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __getitem__(self, i):
        return self.paths[i]

    def to_dict(self) -> dict:
        return {"truncated": self.truncated, "paths": [p.to_dict() for p in self.paths]}


# -- step rules ---------------------------------------------------------------

@dataclass(frozen=True)
class RuleViolation:
    rule_id: str
    message: str


def check_step(state: IntrusionState, step: AttackStep, kb: KnowledgeBase,
               topology: Topology) -> RuleViolation | None:
    """Return the first rule the step violates in ``state``, or None if legal."""
    tech = kb.get(step.technique_id)
    if tech is None:
        return RuleViolation("unknown-technique", f"unknown technique {step.technique_id!r}")
    asset = topology.get(step.target)
    if asset is None:
        return RuleViolation("unknown-asset", f"unknown asset {step.target!r}")
    tactic = step.tactic_in_use
    if tactic not in tech.tactics:
        return RuleViolation("tactic-not-declared", f"{tech.id} does not serve tactic {tactic.value}")
    if asset.kind not in tech.components:
        return RuleViolation(
            "component-mismatch", f"{tech.id} does not apply to {asset.kind.value} asset {asset.id}"
        )
    if state.empty and tactic is not Tactic.INITIAL_ACCESS:
        return RuleViolation("initial-access-first", "path must begin with InitialAccess")
    if tactic.phase < state.phase_reached:
        return RuleViolation(
            "phase-order",
            f"{tactic.value} ({tactic.phase.name.title()}) after phase {state.phase_reached.name.title()}",
        )
    if tech.locality is Locality.REMOTE:
        missing = tech.required_exposure - asset.exposures
        if missing:
            names = ", ".join(sorted(e.value for e in missing))
            return RuleViolation("exposure", f"{asset.id} lacks required exposure {names}")
        if state.phase_reached is not Phase.PRE:
            return RuleViolation("remote-after-intrusion", "remote techniques are only usable pre-intrusion")
    elif tech.locality is Locality.LOCAL:
        if asset.id not in state.foothold:
            return RuleViolation("not-in-foothold", f"{tech.id} is local and {asset.id} is not a foothold")
    else:
        if asset.id not in state.foothold and not (topology.neighbours(asset.id) & state.foothold):
            return RuleViolation(
                "not-reachable", f"{asset.id} is neither a foothold nor adjacent to one"
            )
    if tactic is Tactic.EXFILTRATION and not state.channels:
        return RuleViolation("exfiltration-needs-channel", "exfiltration requires an established C2 channel")
    return None


def apply_step(state: IntrusionState, step: AttackStep, kb: KnowledgeBase) -> IntrusionState:
    effect = kb[step.technique_id].effect_for(step.tactic_in_use)
    foothold, knowledge, channels = state.foothold, state.knowledge, state.channels
    if effect is Effect.FOOTHOLD:
        foothold = foothold | {step.target}
    elif effect is Effect.KNOWLEDGE:
        knowledge = knowledge | {step.target}
    elif effect is Effect.CHANNEL:
        foothold = foothold | {step.target}
        channels = channels | {step.target}
    return IntrusionState(foothold, knowledge, channels, max(state.phase_reached, step.tactic_in_use.phase))


def candidate_steps(kb: KnowledgeBase, topology: Topology) -> list[AttackStep]:
    """Every kind-compatible triple, in enumeration order."""
    steps = [
        AttackStep(tech.id, tactic, asset.id)
        for tech in kb
        for tactic in tech.tactics
        for asset in topology.assets
        if asset.kind in tech.components
    ]
    steps.sort(key=AttackStep.sort_key)
    return steps


def successors(state: IntrusionState, kb: KnowledgeBase, topology: Topology) -> set[AttackStep]:
    """All steps legal from ``state`` (repeat filtering is a path-level concern)."""
    return {s for s in candidate_steps(kb, topology) if check_step(state, s, kb, topology) is None}


def replay(steps: Iterable[AttackStep], kb: KnowledgeBase,
           state: IntrusionState = EMPTY_STATE) -> IntrusionState:
    for step in steps:
        state = apply_step(state, step, kb)
    return state


# -- encoding for the kernels -------------------------------------------------

_LOCALITY_CODE = {Locality.REMOTE: _pykernel.REMOTE, Locality.LOCAL: _pykernel.LOCAL,
                  Locality.ADJACENT: _pykernel.ADJACENT}
_EFFECT_CODE = {Effect.FOOTHOLD: _pykernel.FOOTHOLD, Effect.KNOWLEDGE: _pykernel.KNOWLEDGE,
                Effect.CHANNEL: _pykernel.CHANNEL, Effect.OUTCOME: _pykernel.OUTCOME}


@dataclass
class _Encoded:
    steps: list[AttackStep]
    technique: list[str]
    asset: list[int]
    locality: list[int]
    phase: list[int]
    initial: list[bool]
    exfil: list[bool]
    effect: list[int]
    goal: list[bool]
    adj: list[int]
    n_assets: int = 0

    def without(self, removed: frozenset[str]) -> _Encoded:
        keep = [i for i, t in enumerate(self.technique) if t not in removed]
        pick = lambda xs: [xs[i] for i in keep]  # noqa: E731
        return _Encoded(
            pick(self.steps), pick(self.technique), pick(self.asset), pick(self.locality),
            pick(self.phase), pick(self.initial), pick(self.exfil), pick(self.effect),
            pick(self.goal), self.adj, self.n_assets,
        )

    def run(self, max_depth: int, max_paths: int, backend: str | None = None):
        kernel = _engine.kernel_for(self.n_assets, backend)
        return kernel(self.asset, self.locality, self.phase, self.initial, self.exfil,
                      self.effect, self.goal, self.adj, max_depth, max_paths)

    def has_path(self, max_depth: int) -> bool:
        return _pykernel.path_exists(self.asset, self.locality, self.phase, self.initial, self.exfil,
                                     self.effect, self.goal, self.adj, max_depth)


def _encode(kb: KnowledgeBase, topology: Topology, objective_filter: Iterable[str] | None = None,
            exclude: Iterable[str] = ()) -> _Encoded:
    position = {aid: i for i, aid in enumerate(topology.asset_ids)}
    adj = [0] * len(position)
    for aid, i in position.items():
        for other in topology.neighbours(aid):
            adj[i] |= 1 << position[other]
    goals = None if objective_filter is None else frozenset(objective_filter)
    excluded = frozenset(exclude)

    enc = _Encoded([], [], [], [], [], [], [], [], [], adj, len(position))
    for step in candidate_steps(kb, topology):
        if step.technique_id in excluded:
            continue
        tech = kb[step.technique_id]
        asset = topology[step.target]
        phase = step.tactic_in_use.phase
        # Remote steps that can never be legal are dropped up front
        if tech.locality is Locality.REMOTE and (
            phase is not Phase.PRE or not tech.required_exposure <= asset.exposures
        ):
            continue
        enc.steps.append(step)
        enc.technique.append(tech.id)
        enc.asset.append(position[asset.id])
        enc.locality.append(_LOCALITY_CODE[tech.locality])
        enc.phase.append(int(phase))
        enc.initial.append(step.tactic_in_use is Tactic.INITIAL_ACCESS)
        enc.exfil.append(step.tactic_in_use is Tactic.EXFILTRATION)
        enc.effect.append(_EFFECT_CODE[tech.effect_for(step.tactic_in_use)])
        enc.goal.append(goals is None or tech.id in goals)
    return enc


# -- operations ---------------------------------------------------------------

def _require_assets(topology: Topology) -> None:
    if not topology.assets:
        raise ValueError("topology has no assets")


def _materialize(enc: _Encoded, index_paths, kb: KnowledgeBase) -> tuple[AttackPath, ...]:
    states: dict[tuple[int, ...], IntrusionState] = {(): EMPTY_STATE}
    out = []
    for idx in index_paths:
        # shared prefixes are common; reuse their states
        for k in range(1, len(idx) + 1):
            key = idx[:k]
            if key not in states:
                states[key] = apply_step(states[idx[:k - 1]], enc.steps[idx[k - 1]], kb)
        out.append(AttackPath(tuple(enc.steps[i] for i in idx), states[idx]))
    return tuple(out)


def enumerate_paths(kb: KnowledgeBase, topology: Topology, bounds: SearchBounds = SearchBounds(),
                    objective_filter: Iterable[str] | None = None, exclude: Iterable[str] = (),
                    backend: str | None = None) -> PathSet:
    """Depth-first enumeration of every legal path up to ``bounds``.

    A path is emitted each time a step in the Objective phase is taken and the
    search keeps extending it, so multi-impact paths are included. Sibling
    steps are visited in (technique id, asset id, tactic) order, which makes
    the output order deterministic. ``objective_filter`` restricts which
    objective techniques may end an emitted path; ``exclude`` removes
    techniques from the knowledge base for this search.
    """
    _require_assets(topology)
    enc = _encode(kb, topology, objective_filter, exclude)
    index_paths, truncated = enc.run(bounds.max_depth, bounds.max_paths, backend)
    return PathSet(_materialize(enc, index_paths, kb), truncated)


def has_path(kb: KnowledgeBase, topology: Topology, max_depth: int = 8,
             exclude: Iterable[str] = ()) -> bool:
    _require_assets(topology)
    return _encode(kb, topology, exclude=exclude).has_path(max_depth)


def path_entry(path: AttackPath) -> EntryPoint:
    return EntryPoint(path.steps[0].target, path.steps[0].technique_id)


def path_violation(steps: Sequence[AttackStep], kb: KnowledgeBase,
                   topology: Topology) -> tuple[int, RuleViolation] | None:
    """First (index, violation) that makes ``steps`` an invalid AttackPath."""
    if not steps:
        return 0, RuleViolation("empty-path", "a path needs at least one step")
    state = EMPTY_STATE
    seen: set[AttackStep] = set()
    for i, step in enumerate(steps):
        if step in seen:
            return i, RuleViolation("repeated-step", f"step {step.label()} already taken")
        problem = check_step(state, step, kb, topology)
        if problem is not None:
            return i, problem
        seen.add(step)
        state = apply_step(state, step, kb)
    if state.phase_reached is not Phase.OBJECTIVE or steps[-1].tactic_in_use.phase is not Phase.OBJECTIVE:
        return len(steps) - 1, RuleViolation("objective-last", "path must end with an Objective-phase step")
    first = steps[0]
    if not is_entry(kb[first.technique_id], topology[first.target]):
        return 0, RuleViolation("entry-point", "first step is not an entry point")
    return None


# -- graphs -------------------------------------------------------------------

@dataclass(frozen=True)
class AttackGraph:
    nodes: tuple[AttackStep, ...]
    edges: tuple[tuple[AttackStep, AttackStep], ...]
    entries: frozenset[AttackStep] = field(default_factory=frozenset)
    objectives: frozenset[AttackStep] = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        ids = {n: i for i, n in enumerate(self.nodes)}
        return {
            "nodes": [
                {**n.to_dict(), "id": ids[n], "entry": n in self.entries, "objective": n in self.objectives}
                for n in self.nodes
            ],
            "edges": [[ids[u], ids[v]] for u, v in self.edges],
        }


def build_graph(paths: Iterable[AttackPath]) -> AttackGraph:
    """Merge paths into one precedence graph; nodes and edges keep first-seen order."""
    nodes: dict[AttackStep, None] = {}
    edges: dict[tuple[AttackStep, AttackStep], None] = {}
    entries = set()
    for path in paths:
        if not path.steps:
            continue
        entries.add(path.steps[0])
        for step in path.steps:
            nodes.setdefault(step)
        for u, v in zip(path.steps, path.steps[1:]):
            edges.setdefault((u, v))
    objectives = {n for n in nodes if n.tactic_in_use.phase is Phase.OBJECTIVE}
    return AttackGraph(tuple(nodes), tuple(edges), frozenset(entries), frozenset(objectives))


# -- cuts ---------------------------------------------------------------------

def technique_cuts(kb: KnowledgeBase, topology: Topology, bounds: SearchBounds = SearchBounds(),
                   max_cut_size: int = 2) -> list[frozenset[str]]:
    """Minimal technique sets whose removal leaves no path within ``bounds.max_depth``.

    Exhaustive subset search by increasing size over techniques that have at
    least one usable step in the topology; supersets of an earlier cut are
    skipped, so every result is minimal. Returns ``[frozenset()]`` when there
    is no path to begin with.
    """
    if max_cut_size < 1:
        raise ValueError("max_cut_size must be >= 1")
    _require_assets(topology)
    enc = _encode(kb, topology)
    if not enc.has_path(bounds.max_depth):
        return [frozenset()]
    universe = sorted(set(enc.technique))
    cuts: list[frozenset[str]] = []
    for size in range(1, max_cut_size + 1):
        for combo in combinations(universe, size):
            candidate = frozenset(combo)
            if any(c <= candidate for c in cuts):
                continue
            if not enc.without(candidate).has_path(bounds.max_depth):
                cuts.append(candidate)
    return cuts
