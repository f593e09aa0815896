import json
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_topology_doc
from fiveg_ttp.applicability import (
    EntryPoint, applicability_matrix, applicable_techniques, entry_points,
)
from fiveg_ttp.kb import ComponentKind, Exposure, KnowledgeBase
from fiveg_ttp.topology import Asset, parse_topology, reference_text

ALL_KIND = {"configuration-exploit", "loss-of-control", "loss-of-security", "denial-of-service"}


def _asset(kind, exposures=()):
    return Asset("x", kind, frozenset(exposures), frozenset())


def test_mano_asset(seed_kb):
    got = applicable_techniques(seed_kb, _asset(ComponentKind.MANO))
    assert {"valid-accounts", "external-remote-services", "exfiltration-over-c2"} <= got
    assert ALL_KIND <= got
    assert got == {t.id for t in seed_kb if ComponentKind.MANO in t.components}
    assert len(got & {t.id for t in seed_kb.mapped()}) == 11


def test_physical_asset(seed_kb):
    got = applicable_techniques(seed_kb, _asset(ComponentKind.PHYSICAL))
    assert "memory-scraping" in got
    assert "resource-overloading" in got
    assert "nf-service-discovery" not in got
    assert len(got) == 7


def test_all_kind_techniques_apply_everywhere(seed_kb):
    for kind in ComponentKind:
        assert ALL_KIND <= applicable_techniques(seed_kb, _asset(kind))


def test_exposure_does_not_change_applicability(seed_kb):
    for kind in ComponentKind:
        assert applicable_techniques(seed_kb, _asset(kind)) == applicable_techniques(
            seed_kb, _asset(kind, Exposure))


def test_reference_entry_points(seed_kb, ref):
    assert entry_points(seed_kb, ref) == {
        EntryPoint("nef", "exploit-public-facing-nf"),
        EntryPoint("mano", "valid-accounts"),
        EntryPoint("mano", "external-remote-services"),
    }


def test_entry_point_needs_exposure(seed_kb):
    doc = json.loads(reference_text())
    for a in doc["assets"]:
        a["exposures"] = []
    assert entry_points(seed_kb, parse_topology(json.dumps(doc))) == set()


def test_sdn_flow_table_row(seed_kb, ref):
    row = applicability_matrix(seed_kb, ref).row("sdn-flow-table-discovery")
    assert row == {a.id: a.id == "sdn-ctrl" for a in ref.assets}


def test_matrix_shape_and_csv(seed_kb, ref):
    m = applicability_matrix(seed_kb, ref)
    assert len(m.cells) * len(m.cells[0]) == 30 * 10
    lines = m.to_csv().splitlines()
    assert lines[0].split(",") == ["technique", *ref.asset_ids]
    assert len(lines) == 31
    assert m.to_dict()["rows"]["memory-scraping"] == ["host-1"]


def test_empty_topology(seed_kb):
    empty = parse_topology('{"name": "e", "assets": [], "edges": []}')
    assert entry_points(seed_kb, empty) == set()
    m = applicability_matrix(seed_kb, empty)
    assert m.asset_ids == () and all(row == () for row in m.cells)


def test_empty_kb(ref):
    kb = KnowledgeBase("e", ())
    assert entry_points(kb, ref) == set()
    assert applicability_matrix(kb, ref).cells == ()


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_kind_determines_row(seed_kb, seed):
    topo = parse_topology(json.dumps(random_topology_doc(random.Random(seed), max_assets=8)))
    by_kind = {}
    for a in topo.assets:
        got = frozenset(applicable_techniques(seed_kb, a))
        assert by_kind.setdefault(a.kind, got) == got


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.data())
def test_monotone_in_kb(seed_kb, seed, data):
    keep = data.draw(st.sets(st.sampled_from(seed_kb.ids)))
    keep |= {seed_kb[t].parent for t in keep if seed_kb[t].parent}
    sub = KnowledgeBase(seed_kb.version, tuple(t for t in seed_kb if t.id in keep))
    topo = parse_topology(json.dumps(random_topology_doc(random.Random(seed), max_assets=5)))
    assert entry_points(sub, topo) <= entry_points(seed_kb, topo)
    for a in topo.assets:
        assert applicable_techniques(sub, a) <= applicable_techniques(seed_kb, a)
