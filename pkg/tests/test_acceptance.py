"""Acceptance criteria 1-7, one test each.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so the verdict is visible even when the assertion fails.
"""

import json
import random
import time

from conftest import ACCEPTANCE, random_topology, record, restrict_to_scenario  # noqa: F401
from dot_grammar import DotSyntaxError, parse_dot
from fiveg_ttp.attackgraph import (
    EMPTY_STATE, AttackPath, AttackStep, SearchBounds, build_graph, enumerate_paths, technique_cuts,
)
from fiveg_ttp.cli import main
from fiveg_ttp.export import to_dot, to_navigator_layer
from fiveg_ttp.kb import ComponentKind, Tactic, lint_knowledge_base, load_seed
from fiveg_ttp.risk import technique_weight
from fiveg_ttp.scenario import BUILTIN_SCENARIOS, load_builtin, scenario_steps, validate_scenario
from fiveg_ttp.topology import load_reference
from oracle import as_triples, brute_force_paths

COLUMNS = {"Physical": 7, "Virtual": 15, "NF": 20, "SDN": 9, "MANO": 11, "NetworkSlice": 9}
ALL_SIX = {"configuration-exploit", "loss-of-control", "loss-of-security", "denial-of-service"}
CP_TACTICS = {"Persistence", "DefenceEvasion", "Discovery", "LateralMovement", "Collection",
              "CommandAndControl"}


def _cli(capsys, *argv):
    status = main(list(argv))
    out, _ = capsys.readouterr()
    return status, out


def test_criterion_1_mapping_fidelity():
    start = time.perf_counter()
    fp = lint_knowledge_base(load_seed()).fingerprint
    elapsed = time.perf_counter() - start
    columns = {k.value: fp.column_counts[k] for k in ComponentKind}
    ok = (fp.technique_count == 28 and columns == COLUMNS and set(fp.all_kinds) == ALL_SIX
          and elapsed < 1.0)
    record(1, ok, f"{fp.technique_count} mapped, columns {columns}, all-six {sorted(fp.all_kinds)}, "
                  f"{elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_prose_tactics():
    kb = load_seed()
    cp = {t.value for t in kb["cp-signalling"].tactics}
    w_cp = technique_weight(kb, "cp-signalling").weight
    w_va = technique_weight(kb, "valid-accounts").weight
    ok = CP_TACTICS <= cp and w_cp == 6 and w_va == 1
    record(2, ok, f"cp-signalling tactics {sorted(cp)}, weight {w_cp}; valid-accounts weight {w_va}")
    assert ok


def test_criterion_3_scenario_replay(capsys):
    start = time.perf_counter()
    kb, ref = load_seed(), load_reference()
    verdicts = {n: validate_scenario(load_builtin(n), kb, ref).overall for n in BUILTIN_SCENARIOS}

    # the literal check: the scenario step lists inside `paths --max-depth 8` output
    status, out = _cli(capsys, "paths", "--max-depth", "8", "--format", "json")
    doc = json.loads(out)
    listed = {tuple(AttackStep.from_dict(s) for s in p["steps"]) for p in doc["paths"]}
    verbatim = {n: scenario_steps(load_builtin(n)) in listed for n in BUILTIN_SCENARIOS}

    # membership shown another way: a path over a restricted KB/topology is a path
    # over the full inputs, so enumerate there exhaustively. A k-step path is emitted
    # under depth 8 exactly when it is emitted under depth k.
    restricted = {}
    for n in BUILTIN_SCENARIOS:
        spec = load_builtin(n)
        sub_kb, sub_topo = restrict_to_scenario(kb, ref, spec)
        got = enumerate_paths(sub_kb, sub_topo, SearchBounds(len(spec.steps), 10**6))
        restricted[n] = not got.truncated and scenario_steps(spec) in {p.steps for p in got}
    elapsed = time.perf_counter() - start

    ok = all(verdicts.values()) and all(verbatim.values()) and elapsed < 10
    record(3, ok, f"validate {verdicts}; verbatim in `paths --max-depth 8` "
                  f"({doc['count']} paths, truncated={doc['truncated']}) {verbatim}; "
                  f"found by restricted exhaustive enumeration {restricted}; {elapsed:.2f}s (< 10s)")
    assert all(verdicts.values()) and all(restricted.values())
    assert ok, "scenario paths lie beyond the max_paths prefix of the depth-8 enumeration"


def test_criterion_4_oracle_equivalence(toy_kb):
    start = time.perf_counter()
    seed_kb = load_seed()
    runs = [(toy_kb, 5, 1000 + i) for i in range(150)] + [(seed_kb, 3, 5000 + i) for i in range(100)]
    agree = 0
    for kb, depth, seed in runs:
        topo = random_topology(random.Random(seed), max_assets=4)
        got = enumerate_paths(kb, topo, SearchBounds(depth, 10**7))
        agree += (not got.truncated and len(got) == len(as_triples(got))
                  and as_triples(got) == brute_force_paths(kb, topo, depth))
    elapsed = time.perf_counter() - start
    ok = agree == len(runs) and elapsed < 60
    record(4, ok, f"{agree}/{len(runs)} topologies agree (150 toy KB depth 5, 100 seed KB depth 3), "
                  f"{elapsed:.1f}s (< 60s)")
    assert ok


def _check_cuts(kb, topo, bounds, size):
    cuts = technique_cuts(kb, topo, bounds, size)
    checked = 0
    for cut in cuts:
        assert len(enumerate_paths(kb, topo, SearchBounds(bounds.max_depth, 1), exclude=cut)) == 0
        for t in cut:
            assert len(enumerate_paths(kb, topo, SearchBounds(bounds.max_depth, 1), exclude=cut - {t})) >= 1
        checked += 1
    return cuts, checked


def test_criterion_5_cut_soundness():
    kb, ref = load_seed(), load_reference()
    bounds = SearchBounds()
    cuts2, checked2 = _check_cuts(kb, ref, bounds, 2)
    # size 2 admits no cut on the reference network, so also exercise size 3
    cuts3, checked3 = _check_cuts(kb, ref, bounds, 3)
    ok = checked2 == len(cuts2) and checked3 == len(cuts3) and len(cuts3) > 0
    record(5, ok, f"max_cut_size 2: {checked2}/{len(cuts2)} cuts verified; "
                  f"max_cut_size 3: {checked3}/{len(cuts3)} verified {[sorted(c) for c in cuts3]}")
    assert ok


def test_criterion_6_determinism(capsys):
    first = _cli(capsys, "report")
    second = _cli(capsys, "report")
    ok = first == second and first[0] == 0
    record(6, ok, f"two `report` runs byte-identical ({len(first[1].encode())} bytes)")
    assert ok


def test_criterion_7_export_validity():
    kb = load_seed()
    selection = {s.technique_id for s in load_builtin("scenario-1").steps}
    layer = json.loads(to_navigator_layer(kb, selection=selection).to_json())
    layer_ok = sorted(e["techniqueID"] for e in layer["techniques"]) == sorted(selection)

    paths = [AttackPath(scenario_steps(load_builtin(n)), EMPTY_STATE) for n in BUILTIN_SCENARIOS]
    paths += list(enumerate_paths(kb, load_reference(), SearchBounds(8, 500)))
    try:
        parse_dot(to_dot(build_graph(paths)))
        dot_ok = True
    except DotSyntaxError:
        dot_ok = False

    chain_ok = True
    for n in (1, 2, 5, 9):
        steps = tuple(AttackStep(f"t{i}", Tactic.DISCOVERY, "a") for i in range(n))
        doc = parse_dot(to_dot(build_graph([AttackPath(steps, EMPTY_STATE)])))
        chain_ok &= len(doc.nodes) == n and len(doc.edges) == n - 1
    ok = layer_ok and dot_ok and chain_ok
    record(7, ok, f"layer entries match selection {layer_ok}; DOT grammar {dot_ok}; "
                  f"chain n nodes / n-1 edges {chain_ok}")
    assert ok
