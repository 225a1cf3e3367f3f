from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionsensors import (
    Document,
    InvariantViolation,
    ParseError,
    VersionMismatch,
    build_igraph,
    export_dot,
    load,
    save,
)
from actionsensors import fileio
from generators import random_policy_plan, random_world


def world_doc(**overrides) -> dict:
    doc = {
        "format_version": "1",
        "kind": "world",
        "states": [
            {"id": "s_a", "obs": "a"},
            {"id": "s_b", "obs": "b"},
            {"id": "s_g", "obs": "g"},
        ],
        "initial": ["s_a", "s_b", "s_g"],
        "goals": ["s_g"],
        "actions": ["m"],
        "edges": [
            {"from": "s_a", "to": "s_b", "actions": ["m"]},
            {"from": "s_b", "to": "s_g", "actions": ["m"]},
        ],
    }
    doc.update(overrides)
    return doc


class TestLoad:
    def test_fixture_files_load_cleanly(self, fixtures_dir):
        for path in sorted(fixtures_dir.glob("*.json")):
            document = load(path)
            assert document.format_version == "1"

    def test_round_trip_world(self, tmp_path, grid7):
        target = tmp_path / "world.json"
        save(Document.for_body(grid7), target)
        assert load(target).body == grid7

    def test_round_trip_plan(self, tmp_path, zs_plan):
        target = tmp_path / "plan.json"
        save(Document.for_body(zs_plan), target)
        assert load(target).body == zs_plan

    def test_round_trip_constraint(self, tmp_path, landmark_constraint):
        target = tmp_path / "constraint.json"
        save(Document.for_body(landmark_constraint), target)
        assert load(target).body == landmark_constraint

    def test_undeclared_edge_action_rejected(self):
        doc = world_doc(
            edges=[{"from": "s_a", "to": "s_b", "actions": ["teleport"]}]
        )
        with pytest.raises(InvariantViolation):
            fileio.loads(json.dumps(doc))

    def test_unknown_field_rejected(self):
        with pytest.raises(ParseError, match="unexpected"):
            fileio.loads(json.dumps(world_doc(color="blue")))

    def test_missing_field_rejected(self):
        doc = world_doc()
        del doc["actions"]
        with pytest.raises(ParseError, match="missing"):
            fileio.loads(json.dumps(doc))

    def test_version_mismatch(self):
        with pytest.raises(VersionMismatch):
            fileio.loads(json.dumps(world_doc(format_version="99")))

    def test_bad_json_reports_location(self):
        with pytest.raises(ParseError, match=r"<string>:\d+:\d+"):
            fileio.loads("{not valid json")

    def test_unknown_kind(self):
        with pytest.raises(ParseError, match="kind"):
            fileio.loads(json.dumps({"format_version": "1", "kind": "recipe"}))

    def test_wrong_type_rejected(self):
        with pytest.raises(ParseError):
            fileio.loads(json.dumps(world_doc(initial="s_a")))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load(tmp_path / "absent.json")

    def test_save_is_byte_deterministic(self, tmp_path, grid7):
        first = tmp_path / "one.json"
        second = tmp_path / "two.json"
        save(Document.for_body(grid7), first)
        save(Document.for_body(grid7), second)
        assert first.read_bytes() == second.read_bytes()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6))
def test_generated_structures_round_trip(seed):
    rng = random.Random(seed)
    world = random_world(rng)
    plan = random_policy_plan(world, rng)
    assert fileio.loads(fileio.dumps(Document.for_body(world))).body == world
    assert fileio.loads(fileio.dumps(Document.for_body(plan))).body == plan


class TestExportDot:
    def test_chain_world_snapshot(self, chain3):
        assert export_dot(chain3) == (
            "digraph world {\n"
            "  rankdir=LR;\n"
            '  "s_a" [label="a", shape=circle, penwidth=2];\n'
            '  "s_b" [label="b", shape=circle, penwidth=2];\n'
            '  "s_g" [label="g", shape=doublecircle, penwidth=2];\n'
            '  "s_a" -> "s_b" [label="{m}"];\n'
            '  "s_b" -> "s_g" [label="{m}"];\n'
            "}\n"
        )

    def test_seven_region_world_has_seven_nodes(self, grid7):
        text = export_dot(grid7)
        node_lines = [
            line for line in text.splitlines() if "label=" in line and "->" not in line
        ]
        assert len(node_lines) == 7

    def test_plan_marks_terminating_states(self, chain3_walk):
        text = export_dot(chain3_walk)
        assert "doublecircle" in text
        assert '"pa" -> "pb" [label="{b}"]' in text

    def test_igraph_layers_and_counts(self, grid7, zs_plan):
        igraph = build_igraph(zs_plan, grid7)
        text = export_dot(igraph)
        lines = text.splitlines()
        assert sum("shape=diamond" in line for line in lines) == 1
        assert sum("shape=ellipse" in line for line in lines) == 15
        assert sum("shape=box" in line for line in lines) == 18
        edge_count = sum("->" in line for line in lines)
        assert edge_count == 7 + 18 + 18  # init + action + outcome

    def test_deterministic_bytes(self, grid7, zs_plan):
        assert export_dot(grid7) == export_dot(grid7)
        igraph_a = export_dot(build_igraph(zs_plan, grid7))
        igraph_b = export_dot(build_igraph(zs_plan, grid7))
        assert igraph_a == igraph_b
