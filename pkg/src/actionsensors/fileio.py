"""Versioned JSON documents and DOT export.

Worlds, plans, and indistinguishability constraints round-trip through a
strict, diff-friendly JSON schema; unknown fields are rejected and
structural invariants are validated on load.  DOT output is
byte-deterministic for a fixed input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

from .clip import IGraph, _key_order
from .exceptions import InvariantViolation, ParseError, VersionMismatch
from .model import Edge, Plan, World
from .sensors import IndistinguishabilityConstraint

FORMAT_VERSION = "1"

Body = Union[World, Plan, IndistinguishabilityConstraint]


@dataclass(frozen=True)
class Document:
    """A typed, versioned file payload."""

    format_version: str
    kind: str
    body: Body

    @classmethod
    def for_body(cls, body: Body) -> "Document":
        if isinstance(body, World):
            kind = "world"
        elif isinstance(body, Plan):
            kind = "plan"
        elif isinstance(body, IndistinguishabilityConstraint):
            kind = "constraint"
        else:
            raise ParseError(f"unsupported document body: {type(body).__name__}")
        return cls(FORMAT_VERSION, kind, body)


def _expect_keys(obj: dict, required: set[str], where: str) -> None:
    missing = required - obj.keys()
    if missing:
        raise ParseError(f"{where}: missing field(s) {sorted(missing)}")
    unknown = obj.keys() - required
    if unknown:
        raise ParseError(f"{where}: unexpected field(s) {sorted(unknown)}")


def _string_list(value: Any, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{where}: expected a list of strings")
    return value


def _world_from(obj: dict) -> World:
    _expect_keys(
        obj,
        {"format_version", "kind", "states", "initial", "goals", "actions", "edges"},
        "world document",
    )
    states: list[str] = []
    obs_label: dict[str, str] = {}
    if not isinstance(obj["states"], list):
        raise ParseError("states: expected a list")
    for i, entry in enumerate(obj["states"]):
        where = f"states[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        _expect_keys(entry, {"id", "obs"}, where)
        if not isinstance(entry["id"], str) or not isinstance(entry["obs"], str):
            raise ParseError(f"{where}: id and obs must be strings")
        states.append(entry["id"])
        obs_label[entry["id"]] = entry["obs"]
    edges = _edges_from(obj["edges"], "actions")
    try:
        return World(
            states=frozenset(states),
            initial_states=frozenset(_string_list(obj["initial"], "initial")),
            goal_states=frozenset(_string_list(obj["goals"], "goals")),
            observations=frozenset(obs_label.values()),
            actions=frozenset(_string_list(obj["actions"], "actions")),
            edges=edges,
            obs_label=obs_label,
        )
    except InvariantViolation as exc:
        raise InvariantViolation(f"world document: {exc}") from exc


def _plan_from(obj: dict) -> Plan:
    _expect_keys(
        obj,
        {
            "format_version",
            "kind",
            "states",
            "initial",
            "terminating",
            "actions",
            "observations",
            "edges",
        },
        "plan document",
    )
    states: list[str] = []
    action_label: dict[str, frozenset[str]] = {}
    if not isinstance(obj["states"], list):
        raise ParseError("states: expected a list")
    for i, entry in enumerate(obj["states"]):
        where = f"states[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        _expect_keys(entry, {"id", "actions"}, where)
        if not isinstance(entry["id"], str):
            raise ParseError(f"{where}: id must be a string")
        states.append(entry["id"])
        action_label[entry["id"]] = frozenset(_string_list(entry["actions"], where))
    edges = _edges_from(obj["edges"], "observations")
    try:
        return Plan(
            states=frozenset(states),
            initial_states=frozenset(_string_list(obj["initial"], "initial")),
            terminating_states=frozenset(_string_list(obj["terminating"], "terminating")),
            actions=frozenset(_string_list(obj["actions"], "actions")),
            observations=frozenset(_string_list(obj["observations"], "observations")),
            action_label=action_label,
            edges=edges,
        )
    except InvariantViolation as exc:
        raise InvariantViolation(f"plan document: {exc}") from exc


def _constraint_from(obj: dict) -> IndistinguishabilityConstraint:
    _expect_keys(obj, {"format_version", "kind", "classes"}, "constraint document")
    if not isinstance(obj["classes"], list):
        raise ParseError("classes: expected a list of lists")
    classes = []
    for i, cls_ in enumerate(obj["classes"]):
        classes.append(frozenset(_string_list(cls_, f"classes[{i}]")))
    try:
        return IndistinguishabilityConstraint(frozenset(classes))
    except InvariantViolation as exc:
        raise InvariantViolation(f"constraint document: {exc}") from exc


def _edges_from(value: Any, label_field: str) -> frozenset[Edge]:
    if not isinstance(value, list):
        raise ParseError("edges: expected a list")
    edges = []
    for i, entry in enumerate(value):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        _expect_keys(entry, {"from", "to", label_field}, where)
        if not isinstance(entry["from"], str) or not isinstance(entry["to"], str):
            raise ParseError(f"{where}: from and to must be strings")
        labels = frozenset(_string_list(entry[label_field], where))
        if not labels:
            raise InvariantViolation(f"{where}: empty {label_field} set")
        edges.append(Edge(entry["from"], entry["to"], labels))
    return frozenset(edges)


def loads(text: str, source: str = "<string>") -> Document:
    """Parse a document from JSON text; see load()."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: expected a JSON object")
    version = obj.get("format_version")
    if version is None:
        raise ParseError(f"{source}: missing field 'format_version'")
    if version != FORMAT_VERSION:
        raise VersionMismatch(
            f"{source}: format version {version!r} is not supported (expected {FORMAT_VERSION!r})"
        )
    kind = obj.get("kind")
    if kind == "world":
        body: Body = _world_from(obj)
    elif kind == "plan":
        body = _plan_from(obj)
    elif kind == "constraint":
        body = _constraint_from(obj)
    else:
        raise ParseError(f"{source}: unknown document kind {kind!r}")
    return Document(format_version=version, kind=kind, body=body)


def load(path: str | Path) -> Document:
    """Load and validate a document; errors carry the offending location."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return loads(text, source=str(path))
    except InvariantViolation as exc:
        raise InvariantViolation(f"{path}: {exc}") from exc


def _edge_objects(edges: frozenset[Edge], label_field: str) -> list[dict]:
    return [
        {"from": e.source, "to": e.target, label_field: sorted(e.labels)}
        for e in sorted(edges, key=Edge.sort_key)
    ]


def body_object(body: Body) -> dict:
    """The canonical JSON object for a document body."""
    if isinstance(body, World):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "world",
            "states": [
                {"id": s, "obs": body.obs_label[s]} for s in sorted(body.states)
            ],
            "initial": sorted(body.initial_states),
            "goals": sorted(body.goal_states),
            "actions": sorted(body.actions),
            "edges": _edge_objects(body.edges, "actions"),
        }
    if isinstance(body, Plan):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "plan",
            "states": [
                {"id": s, "actions": sorted(body.action_label[s])}
                for s in sorted(body.states)
            ],
            "initial": sorted(body.initial_states),
            "terminating": sorted(body.terminating_states),
            "actions": sorted(body.actions),
            "observations": sorted(body.observations),
            "edges": _edge_objects(body.edges, "observations"),
        }
    if isinstance(body, IndistinguishabilityConstraint):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "constraint",
            "classes": sorted(sorted(c) for c in body.classes),
        }
    raise ParseError(f"unsupported document body: {type(body).__name__}")


def dumps(document: Document) -> str:
    return json.dumps(body_object(document.body), indent=2, sort_keys=True) + "\n"


def save(document: Document, path: str | Path) -> None:
    Path(path).write_text(dumps(document))


def _quote(name: str) -> str:
    return '"%s"' % name.replace("\\", "\\\\").replace('"', '\\"')


def _label_set(labels: frozenset[str]) -> str:
    return "{%s}" % ", ".join(sorted(labels))


def export_dot(obj: World | Plan | IGraph) -> str:
    """Render a world, plan, or interaction graph as DOT text.

    Worlds show observations on vertices and action sets on edges; plans
    the dual; interaction graphs render their three layers with distinct
    shapes.  Output is byte-deterministic.
    """
    if isinstance(obj, World):
        return _world_dot(obj)
    if isinstance(obj, Plan):
        return _plan_dot(obj)
    if isinstance(obj, IGraph):
        return _igraph_dot(obj)
    raise ParseError(f"cannot export {type(obj).__name__} as DOT")


def _world_dot(world: World) -> str:
    lines = ["digraph world {", "  rankdir=LR;"]
    for state in sorted(world.states):
        attrs = [f"label={_quote(world.obs_label[state])}"]
        if state in world.goal_states:
            attrs.append("shape=doublecircle")
        else:
            attrs.append("shape=circle")
        if state in world.initial_states:
            attrs.append("penwidth=2")
        lines.append(f"  {_quote(state)} [{', '.join(attrs)}];")
    for edge in sorted(world.edges, key=Edge.sort_key):
        lines.append(
            f"  {_quote(edge.source)} -> {_quote(edge.target)} "
            f"[label={_quote(_label_set(edge.labels))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _plan_dot(plan: Plan) -> str:
    lines = ["digraph plan {", "  rankdir=LR;"]
    for state in sorted(plan.states):
        attrs = [f"label={_quote(state + ': ' + _label_set(plan.action_label[state]))}"]
        if state in plan.terminating_states:
            attrs.append("shape=doublecircle")
        elif state in plan.initial_states:
            attrs.append("shape=point")
        else:
            attrs.append("shape=box")
        lines.append(f"  {_quote(state)} [{', '.join(attrs)}];")
    for edge in sorted(plan.edges, key=Edge.sort_key):
        lines.append(
            f"  {_quote(edge.source)} -> {_quote(edge.target)} "
            f"[label={_quote(_label_set(edge.labels))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _igraph_dot(igraph: IGraph) -> str:
    plan_names = {
        key: f"p{i}" for i, key in enumerate(sorted(igraph.plan_vertices, key=_key_order))
    }
    world_names = {
        key: f"w{i}"
        for i, key in enumerate(
            sorted(igraph.world_vertices, key=lambda e: (_key_order(e[0]), e[1]))
        )
    }
    lines = ["digraph igraph {", "  rankdir=TB;", "  init [shape=diamond, label=init];"]
    for key, name in plan_names.items():
        states, world_state = key
        label = "%s @ %s" % (_label_set(frozenset(states)), world_state)
        lines.append(f"  {name} [shape=ellipse, label={_quote(label)}];")
    for key, name in world_names.items():
        lines.append(f"  {name} [shape=box, label={_quote(key[1])}];")
    for obs, target in sorted(igraph.init_edges, key=lambda e: (e[0], _key_order(e[1]))):
        lines.append(f"  init -> {plan_names[target]} [label={_quote(obs)}];")
    for edge in sorted(igraph.action_edges, key=lambda e: (_key_order(e[0]), e[1])):
        vertex, action = edge
        lines.append(
            f"  {plan_names[vertex]} -> {world_names[edge]} [label={_quote(action)}];"
        )
    for world_vertex, obs, target in sorted(
        igraph.outcome_edges,
        key=lambda e: (_key_order(e[0][0]), e[0][1], e[1], _key_order(e[2])),
    ):
        lines.append(
            f"  {world_names[world_vertex]} -> {plan_names[target]} [label={_quote(obs)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
