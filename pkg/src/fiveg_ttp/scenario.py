"""Declarative attack scenarios and their replay against the step rules."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .attackgraph import (
    EMPTY_STATE, AttackPath, AttackStep, apply_step, check_step,
)
from .kb import KnowledgeBase, Phase, Tactic
from .topology import Topology

BUILTIN_SCENARIOS = ("scenario-1", "scenario-2")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioStep:
    technique_id: str
    tactic_in_use: str
    target_asset_id: str
    note: str = ""
    annotations: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    steps: tuple[ScenarioStep, ...]
    expected_outcome: str = ""


@dataclass(frozen=True)
class StepResult:
    index: int
    rule_id: str
    passed: bool
    message: str

    def to_dict(self) -> dict:
        return {"index": self.index, "rule_id": self.rule_id, "pass": self.passed, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    scenario: str
    steps: tuple[StepResult, ...]
    overall: bool
    path: AttackPath | None = field(default=None, compare=False)

    def first_failure(self) -> StepResult | None:
        return next((s for s in self.steps if not s.passed), None)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "overall": "pass" if self.overall else "fail",
                "steps": [s.to_dict() for s in self.steps]}

    def to_text(self) -> str:
        lines = [f"scenario {self.scenario}: {'PASS' if self.overall else 'FAIL'}"]
        for s in self.steps:
            mark = "ok  " if s.passed else "FAIL"
            lines.append(f"  [{mark}] {s.index}: {s.rule_id}: {s.message}")
        return "\n".join(lines) + "\n"


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse a scenario document. References are resolved only at validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise ScenarioError("scenario needs a non-empty steps array")
    steps = []
    for i, rec in enumerate(raw_steps):
        if not isinstance(rec, dict) or not all(isinstance(rec.get(k), str) for k in ("technique", "tactic", "target")):
            raise ScenarioError(f"step {i}: technique, tactic and target must be strings")
        steps.append(ScenarioStep(
            rec["technique"], rec["tactic"], rec["target"],
            note=str(rec.get("note", "")),
            annotations=tuple(rec.get("annotations", ())),
        ))
    return ScenarioSpec(
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
        steps=tuple(steps),
        expected_outcome=str(doc.get("expected_outcome", "")),
    )


def builtin_text(name: str) -> str:
    if name not in BUILTIN_SCENARIOS:
        raise ScenarioError(f"unknown builtin scenario {name!r}")
    return resources.files("fiveg_ttp").joinpath(f"data/{name}.json").read_text(encoding="utf-8")


def load_builtin(name: str) -> ScenarioSpec:
    return parse_scenario(builtin_text(name))


def validate_scenario(spec: ScenarioSpec, kb: KnowledgeBase, topology: Topology) -> ValidationReport:
    """Replay the steps from the empty state; stop at the first broken rule."""
    results: list[StepResult] = []
    state = EMPTY_STATE
    taken: list[AttackStep] = []
    failed = False
    for i, raw in enumerate(spec.steps):
        if failed:
            results.append(StepResult(i, "skipped", False, "not evaluated after an earlier failure"))
            continue
        try:
            tactic = Tactic(raw.tactic_in_use)
        except ValueError:
            results.append(StepResult(i, "unknown-tactic", False, f"unknown tactic {raw.tactic_in_use!r}"))
            failed = True
            continue
        step = AttackStep(raw.technique_id, tactic, raw.target_asset_id)
        if step in taken:
            results.append(StepResult(i, "repeated-step", False, f"step {step.label()} already taken"))
            failed = True
            continue
        problem = check_step(state, step, kb, topology)
        if problem is not None:
            results.append(StepResult(i, problem.rule_id, False, problem.message))
            failed = True
            continue
        state = apply_step(state, step, kb)
        taken.append(step)
        results.append(StepResult(i, "legal", True, step.label()))

    path = None
    if not failed:
        if state.phase_reached is Phase.OBJECTIVE and taken[-1].tactic_in_use.phase is Phase.OBJECTIVE:
            path = AttackPath(tuple(taken), state)
        else:
            last = len(results) - 1
            results[last] = StepResult(
                last, "objective-last", False, "path must end with an Objective-phase step"
            )
            failed = True
    return ValidationReport(spec.name, tuple(results), not failed, path)


def scenario_steps(spec: ScenarioSpec) -> tuple[AttackStep, ...]:
    return tuple(AttackStep(s.technique_id, Tactic(s.tactic_in_use), s.target_asset_id) for s in spec.steps)
