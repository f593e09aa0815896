"""TTP knowledge base: data model, JSON (de)serialization, linting and the seed dataset."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from importlib import resources
from typing import Iterable, Iterator, Mapping


class Phase(IntEnum):
    """Attack lifecycle phase. Ordering is the only ordering the engine enforces."""

    PRE = 0
    POST = 1
    OBJECTIVE = 2


class Tactic(str, Enum):
    INITIAL_ACCESS = "InitialAccess"
    EXECUTION = "Execution"
    PERSISTENCE = "Persistence"
    DEFENCE_EVASION = "DefenceEvasion"
    DISCOVERY = "Discovery"
    LATERAL_MOVEMENT = "LateralMovement"
    COLLECTION = "Collection"
    COMMAND_AND_CONTROL = "CommandAndControl"
    EXFILTRATION = "Exfiltration"
    IMPACT = "Impact"

    @property
    def phase(self) -> Phase:
        return _TACTIC_PHASE[self]

    @property
    def rank(self) -> int:
        return _TACTIC_ORDER.index(self)


_TACTIC_ORDER = list(Tactic)

_TACTIC_PHASE = {
    Tactic.INITIAL_ACCESS: Phase.PRE,
    Tactic.EXECUTION: Phase.PRE,
    Tactic.PERSISTENCE: Phase.POST,
    Tactic.DEFENCE_EVASION: Phase.POST,
    Tactic.DISCOVERY: Phase.POST,
    Tactic.LATERAL_MOVEMENT: Phase.POST,
    Tactic.COLLECTION: Phase.POST,
    Tactic.COMMAND_AND_CONTROL: Phase.POST,
    Tactic.EXFILTRATION: Phase.OBJECTIVE,
    Tactic.IMPACT: Phase.OBJECTIVE,
}


def phase_of(tactic: Tactic) -> Phase:
    return _TACTIC_PHASE[tactic]


class ComponentKind(str, Enum):
    PHYSICAL = "Physical"
    VIRTUAL = "Virtual"
    NF = "NF"
    SDN = "SDN"
    MANO = "MANO"
    NETWORK_SLICE = "NetworkSlice"


class Exposure(str, Enum):
    PUBLIC_FACING = "PublicFacing"
    EXTERNAL_REMOTE_SERVICE = "ExternalRemoteService"
    ROAMING_INTERCONNECT = "RoamingInterconnect"
    THIRD_PARTY_APPLICATION = "ThirdPartyApplication"


class Provenance(str, Enum):
    NEW_5G = "New5G"
    EXISTING_ATTACK = "ExistingAttack"
    SUB_TECHNIQUE = "SubTechnique"


class Effect(str, Enum):
    """What a successful step adds to the intrusion state."""

    FOOTHOLD = "Foothold"
    KNOWLEDGE = "Knowledge"
    CHANNEL = "Channel"
    OUTCOME = "Outcome"


class Locality(str, Enum):
    REMOTE = "Remote"
    LOCAL = "Local"
    ADJACENT = "Adjacent"


class KBError(ValueError):
    """Knowledge base content violates the file format or a model invariant."""

    def __init__(self, message: str, technique_id: str | None = None):
        super().__init__(message)
        self.technique_id = technique_id


class KBSyntaxError(KBError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Technique:
    id: str
    name: str
    tactics: frozenset[Tactic]
    components: frozenset[ComponentKind]
    provenance: Provenance
    effect: Effect
    locality: Locality
    parent: str | None = None
    required_exposure: frozenset[Exposure] = frozenset()
    # per-tactic overrides of ``effect`` for multi-purpose techniques
    effect_by_tactic: Mapping[Tactic, Effect] = field(default_factory=dict)
    inferred_tactics: frozenset[Tactic] = frozenset()
    components_editorial: bool = False
    notes: str = ""

    def effect_for(self, tactic: Tactic) -> Effect:
        return self.effect_by_tactic.get(tactic, self.effect)

    def sorted_tactics(self) -> list[Tactic]:
        return sorted(self.tactics, key=lambda t: t.rank)

    def violations(self) -> list[str]:
        """Return invariant violations for this technique in isolation."""
        problems = []
        if not self.id:
            problems.append("empty id")
        if not self.tactics:
            problems.append("empty tactic set")
        if not self.components:
            problems.append("empty component set")
        if (self.provenance is Provenance.SUB_TECHNIQUE) != (self.parent is not None):
            problems.append("parent is required for, and only for, SubTechnique provenance")
        if self.parent == self.id:
            problems.append("technique is its own parent")
        for tactic in self.tactics:
            if tactic.phase is Phase.OBJECTIVE and self.effect_for(tactic) is not Effect.OUTCOME:
                problems.append(f"objective tactic {tactic.value} must have effect Outcome")
        if Tactic.INITIAL_ACCESS in self.tactics:
            if self.locality is not Locality.REMOTE:
                problems.append("InitialAccess technique must be Remote")
            if not self.required_exposure:
                problems.append("InitialAccess technique needs a non-empty required_exposure")
            if self.effect_for(Tactic.INITIAL_ACCESS) is not Effect.FOOTHOLD:
                problems.append("InitialAccess must have effect Foothold")
        if self.required_exposure and self.locality is not Locality.REMOTE:
            problems.append("required_exposure is only meaningful for Remote techniques")
        extra = set(self.effect_by_tactic) - self.tactics
        if extra:
            problems.append(f"effect override for undeclared tactic(s) {_names(extra)}")
        extra = self.inferred_tactics - self.tactics
        if extra:
            problems.append(f"inferred tactic(s) {_names(extra)} not among tactics")
        return problems


def _names(items: Iterable[Enum]) -> str:
    return ", ".join(sorted(i.value for i in items))


@dataclass(frozen=True)
class KnowledgeBase:
    version: str
    techniques: tuple[Technique, ...]
    _index: dict[str, Technique] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, Technique] = {}
        seen_names: set[tuple[str, Provenance]] = set()
        for tech in self.techniques:
            problems = tech.violations()
            if problems:
                raise KBError(f"technique {tech.id!r}: {problems[0]}", tech.id)
            if tech.id in index:
                raise KBError(f"duplicate technique id {tech.id!r}", tech.id)
            key = (tech.name, tech.provenance)
            if key in seen_names:
                raise KBError(
                    f"duplicate (name, provenance) ({tech.name!r}, {tech.provenance.value})", tech.id
                )
            seen_names.add(key)
            index[tech.id] = tech
        for tech in self.techniques:
            if tech.parent is not None and tech.parent not in index:
                raise KBError(f"technique {tech.id!r}: dangling parent {tech.parent!r}", tech.id)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.techniques)

    def __iter__(self) -> Iterator[Technique]:
        return iter(self.techniques)

    def __contains__(self, technique_id: object) -> bool:
        return technique_id in self._index

    def __getitem__(self, technique_id: str) -> Technique:
        try:
            return self._index[technique_id]
        except KeyError:
            raise KeyError(f"unknown technique {technique_id!r}") from None

    def get(self, technique_id: str) -> Technique | None:
        return self._index.get(technique_id)

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.techniques]

    def mapped(self) -> list[Technique]:
        """Techniques whose component sets come from the published mapping."""
        return [t for t in self.techniques if not t.components_editorial]


# -- file format --------------------------------------------------------------

_FIELDS = {
    "id", "name", "tactics", "components", "provenance", "parent", "effect",
    "effect_by_tactic", "locality", "required_exposure", "inferred_tactics",
    "components_editorial", "notes",
}


def _enum_list(enum_cls, raw, what: str, tid: str) -> frozenset:
    if not isinstance(raw, list):
        raise KBError(f"technique {tid!r}: {what} must be an array", tid)
    return frozenset(_enum_value(enum_cls, item, what, tid) for item in raw)


def _enum_value(enum_cls, raw, what: str, tid: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise KBError(f"technique {tid!r}: unknown {what} name {raw!r}", tid) from None


def _technique_from_record(rec: dict) -> Technique:
    if not isinstance(rec, dict):
        raise KBError("technique record must be an object")
    tid = rec.get("id")
    if not isinstance(tid, str) or not tid:
        raise KBError("technique record without a string id")
    unknown = set(rec) - _FIELDS
    if unknown:
        raise KBError(f"technique {tid!r}: unknown field(s) {sorted(unknown)}", tid)
    for required in ("name", "tactics", "components", "provenance", "effect", "locality"):
        if required not in rec:
            raise KBError(f"technique {tid!r}: missing field {required!r}", tid)
    overrides = rec.get("effect_by_tactic", {})
    if not isinstance(overrides, dict):
        raise KBError(f"technique {tid!r}: effect_by_tactic must be an object", tid)
    return Technique(
        id=tid,
        name=str(rec["name"]),
        tactics=_enum_list(Tactic, rec["tactics"], "tactic", tid),
        components=_enum_list(ComponentKind, rec["components"], "component", tid),
        provenance=_enum_value(Provenance, rec["provenance"], "provenance", tid),
        parent=rec.get("parent"),
        effect=_enum_value(Effect, rec["effect"], "effect", tid),
        effect_by_tactic={
            _enum_value(Tactic, k, "tactic", tid): _enum_value(Effect, v, "effect", tid)
            for k, v in overrides.items()
        },
        locality=_enum_value(Locality, rec["locality"], "locality", tid),
        required_exposure=_enum_list(Exposure, rec.get("required_exposure", []), "exposure", tid),
        inferred_tactics=_enum_list(Tactic, rec.get("inferred_tactics", []), "tactic", tid),
        components_editorial=bool(rec.get("components_editorial", False)),
        notes=str(rec.get("notes", "")),
    )


def parse_knowledge_base(text: str) -> KnowledgeBase:
    """Parse a KB JSON document; raises KBSyntaxError or KBError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KBSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("techniques"), list):
        raise KBError('top level must be an object with a "techniques" array')
    version = doc.get("version")
    if not isinstance(version, str):
        raise KBError('"version" must be a string')
    return KnowledgeBase(version, tuple(_technique_from_record(r) for r in doc["techniques"]))


def _technique_record(tech: Technique) -> dict:
    rec: dict = {
        "id": tech.id,
        "name": tech.name,
        "tactics": [t.value for t in tech.sorted_tactics()],
        "components": [c.value for c in ComponentKind if c in tech.components],
        "provenance": tech.provenance.value,
    }
    if tech.parent is not None:
        rec["parent"] = tech.parent
    rec["effect"] = tech.effect.value
    if tech.effect_by_tactic:
        rec["effect_by_tactic"] = {
            t.value: tech.effect_by_tactic[t].value
            for t in sorted(tech.effect_by_tactic, key=lambda t: t.rank)
        }
    rec["locality"] = tech.locality.value
    if tech.required_exposure:
        rec["required_exposure"] = [e.value for e in Exposure if e in tech.required_exposure]
    if tech.inferred_tactics:
        rec["inferred_tactics"] = [t.value for t in sorted(tech.inferred_tactics, key=lambda t: t.rank)]
    if tech.components_editorial:
        rec["components_editorial"] = True
    if tech.notes:
        rec["notes"] = tech.notes
    return rec


def serialize_knowledge_base(kb: KnowledgeBase) -> str:
    doc = {"version": kb.version, "techniques": [_technique_record(t) for t in kb]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def seed_text() -> str:
    return resources.files("fiveg_ttp").joinpath("data/seed_kb.json").read_text(encoding="utf-8")


def load_seed() -> KnowledgeBase:
    return parse_knowledge_base(seed_text())


# -- linting ------------------------------------------------------------------

class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: Severity
    message: str
    technique_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity.value,
            "message": self.message,
            "technique_id": self.technique_id,
        }


@dataclass(frozen=True)
class Fingerprint:
    technique_count: int
    column_counts: dict[ComponentKind, int]
    all_kinds: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "technique_count": self.technique_count,
            "column_counts": {k.value: self.column_counts[k] for k in ComponentKind},
            "all_kinds": sorted(self.all_kinds),
        }


@dataclass(frozen=True)
class LintReport:
    findings: tuple[Finding, ...]
    fingerprint: Fingerprint | None = None

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "fingerprint": self.fingerprint.to_dict() if self.fingerprint else None,
            "findings": [f.to_dict() for f in self.findings],
        }


# Reference fingerprint of the published component mapping.
REFERENCE_TECHNIQUE_COUNT = 28
REFERENCE_COLUMN_COUNTS = {
    ComponentKind.PHYSICAL: 7,
    ComponentKind.VIRTUAL: 15,
    ComponentKind.NF: 20,
    ComponentKind.SDN: 9,
    ComponentKind.MANO: 11,
    ComponentKind.NETWORK_SLICE: 9,
}
REFERENCE_ALL_KINDS = frozenset(
    {"configuration-exploit", "loss-of-control", "loss-of-security", "denial-of-service"}
)

_POST_SIX = frozenset({
    Tactic.PERSISTENCE, Tactic.DEFENCE_EVASION, Tactic.DISCOVERY,
    Tactic.LATERAL_MOVEMENT, Tactic.COLLECTION, Tactic.COMMAND_AND_CONTROL,
})

# Tactic facts stated in prose; (technique id, tactics that must be present, exact match?)
PROSE_TACTICS: tuple[tuple[str, frozenset[Tactic], bool], ...] = (
    ("cp-signalling", _POST_SIX, False),
    ("exploit-public-facing-nf", frozenset({Tactic.INITIAL_ACCESS}), False),
    ("valid-accounts", frozenset({Tactic.INITIAL_ACCESS}), False),
    ("external-remote-services", frozenset({Tactic.INITIAL_ACCESS}), False),
    ("implant-container-vm-image", frozenset({Tactic.PERSISTENCE, Tactic.DEFENCE_EVASION}), False),
    ("container-vm-breakout", frozenset({Tactic.LATERAL_MOVEMENT}), False),
    ("sdn-flow-table-discovery", frozenset({Tactic.DISCOVERY}), False),
    ("data-from-nf-repositories", frozenset({Tactic.COLLECTION}), False),
    ("memory-scraping", frozenset({Tactic.COLLECTION}), False),
    ("sbi-eavesdropping", frozenset({Tactic.COLLECTION}), False),
    ("nf-compromise", frozenset({Tactic.COMMAND_AND_CONTROL}), False),
    ("external-remote-services-c2", frozenset({Tactic.COMMAND_AND_CONTROL}), False),
    ("exfiltration-over-c2", frozenset({Tactic.EXFILTRATION}), True),
    ("resource-overloading", frozenset({Tactic.IMPACT}), False),
    ("network-slice-isolation-compromise", frozenset({Tactic.IMPACT}), False),
    ("data-modification", frozenset({Tactic.IMPACT}), False),
    ("abuse-of-lawful-intercept", frozenset({Tactic.IMPACT}), False),
    ("service-fraud", frozenset({Tactic.IMPACT}), False),
    ("loss-of-security", frozenset({Tactic.IMPACT}), False),
    ("loss-of-control", frozenset({Tactic.IMPACT}), False),
)


def fingerprint(kb: KnowledgeBase) -> Fingerprint:
    mapped = kb.mapped()
    counts = {k: sum(1 for t in mapped if k in t.components) for k in ComponentKind}
    every = frozenset(t.id for t in mapped if len(t.components) == len(ComponentKind))
    return Fingerprint(len(mapped), counts, every)


def lint_knowledge_base(kb: KnowledgeBase) -> LintReport:
    findings: list[Finding] = []
    warn = Severity.WARNING

    for tech in kb:
        for problem in tech.violations():
            findings.append(Finding("invariant", Severity.ERROR, problem, tech.id))

    fp = fingerprint(kb)
    if fp.technique_count != REFERENCE_TECHNIQUE_COUNT:
        findings.append(Finding(
            "fingerprint-count", warn,
            f"{fp.technique_count} component-mapped techniques, expected {REFERENCE_TECHNIQUE_COUNT}",
        ))
    for kind, expected in REFERENCE_COLUMN_COUNTS.items():
        if fp.column_counts[kind] != expected:
            findings.append(Finding(
                "fingerprint-column", warn,
                f"{kind.value} column has {fp.column_counts[kind]} techniques, expected {expected}",
            ))
    if fp.all_kinds != REFERENCE_ALL_KINDS:
        findings.append(Finding(
            "fingerprint-all-kinds", warn,
            f"techniques applicable to every kind: {sorted(fp.all_kinds)}, "
            f"expected {sorted(REFERENCE_ALL_KINDS)}",
        ))

    for tid, expected, exact in PROSE_TACTICS:
        tech = kb.get(tid)
        if tech is None:
            findings.append(Finding("prose-technique", warn, "prose-declared technique missing", tid))
            continue
        missing = expected - tech.tactics
        if missing:
            findings.append(Finding(
                "prose-tactic", warn, f"prose-declared tactic absent: {_names(missing)}", tid
            ))
        elif exact and tech.tactics != expected:
            findings.append(Finding(
                "prose-tactic", warn,
                f"tactics {_names(tech.tactics)} differ from prose-declared {_names(expected)}", tid,
            ))

    for tech in kb:
        if tech.inferred_tactics:
            findings.append(Finding(
                "inferred-tactic", warn,
                f"tactic assignment inferred, not prose-confirmed: {_names(tech.inferred_tactics)}",
                tech.id,
            ))
        if tech.components_editorial:
            findings.append(Finding(
                "editorial-components", warn,
                "not in the published component mapping; components editorially supplied",
                tech.id,
            ))
    return LintReport(tuple(findings), fp)


def lint_text(text: str) -> LintReport:
    """Lint raw KB text, reporting semantic parse failures as Error findings.

    Syntax errors still raise KBSyntaxError: there is nothing to lint.
    """
    try:
        kb = parse_knowledge_base(text)
    except KBSyntaxError:
        raise
    except KBError as exc:
        return LintReport((Finding("parse", Severity.ERROR, str(exc), exc.technique_id),))
    return lint_knowledge_base(kb)
