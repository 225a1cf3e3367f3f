"""Interaction-graph construction and crossover clipping.

The interaction graph (I-graph) folds a plan onto its world in three
layers: a single initiating vertex, plan-layer vertices keyed by (set of
plan states, world state), and world-layer vertices keyed by (plan-layer
vertex, action).  Cycles of the world-state projection are exactly the
plan's crossovers; the clipping search enumerates every way of removing
candidate action edges so that the projection becomes acyclic, and emits
one representative plan per surviving operative action set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import _graphs
from .exceptions import (
    CapExceeded,
    CrossoverError,
    InvariantViolation,
    NoRepresentative,
    NotASolution,
)
from .model import Edge, Plan, World
from .progress import (
    OperativeActionSet,
    compute_progress_measure,
    operative_action_set,
)
from .validate import solves

PlanKey = tuple[frozenset[str], str]  # (plan states, world state)
WorldKey = tuple[PlanKey, str]  # (source plan-layer vertex, action)
ActionEdge = WorldKey
OutcomeEdge = tuple[WorldKey, str, PlanKey]  # labeled with an observation


def _key_order(key: PlanKey) -> tuple:
    return (key[1], tuple(sorted(key[0])))


def _action_edge_order(edge: ActionEdge) -> tuple:
    return (_key_order(edge[0]), edge[1])


@dataclass(frozen=True)
class IGraph:
    """Three-layer plan-world interaction structure.

    ``action_edges`` double as the world-layer vertices (one per
    plan-layer vertex and offered action); ``outcome_edges`` return to
    the plan layer labeled with the observation the world produced.
    """

    init_edges: frozenset[tuple[str, PlanKey]]
    plan_vertices: frozenset[PlanKey]
    action_edges: frozenset[ActionEdge]
    outcome_edges: frozenset[OutcomeEdge]
    actions: frozenset[str]
    observations: frozenset[str]
    goal_states: frozenset[str]
    _out_actions: dict = field(init=False, repr=False, compare=False)
    _outcomes: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        out_actions: dict[PlanKey, list[str]] = {}
        for vertex, action in self.action_edges:
            out_actions.setdefault(vertex, []).append(action)
        outcomes: dict[WorldKey, list[tuple[str, PlanKey]]] = {}
        for world_vertex, obs, target in self.outcome_edges:
            outcomes.setdefault(world_vertex, []).append((obs, target))
        object.__setattr__(
            self, "_out_actions", {k: tuple(sorted(v)) for k, v in out_actions.items()}
        )
        object.__setattr__(
            self,
            "_outcomes",
            {k: tuple(sorted(v, key=lambda e: (e[0], _key_order(e[1])))) for k, v in outcomes.items()},
        )

    @property
    def world_vertices(self) -> frozenset[WorldKey]:
        return self.action_edges

    def actions_at(self, vertex: PlanKey) -> tuple[str, ...]:
        return self._out_actions.get(vertex, ())

    def outcomes_of(self, world_vertex: WorldKey) -> tuple[tuple[str, PlanKey], ...]:
        return self._outcomes.get(world_vertex, ())

    def world_states(self) -> frozenset[str]:
        return frozenset(key[1] for key in self.plan_vertices)

    def vertices_at(self, world_state: str) -> tuple[PlanKey, ...]:
        return tuple(
            sorted((k for k in self.plan_vertices if k[1] == world_state), key=_key_order)
        )

    def world_actions(self, world_state: str) -> frozenset[str]:
        """Collective outgoing actions of every vertex at ``world_state``."""
        return frozenset(
            action for (vertex, action) in self.action_edges if vertex[1] == world_state
        )

    def operative(self) -> OperativeActionSet:
        mapping: dict[str, set[str]] = {w: set() for w in self.world_states()}
        for vertex, action in self.action_edges:
            mapping[vertex[1]].add(action)
        return OperativeActionSet.from_mapping(mapping)

    def projection(self) -> dict[str, set[str]]:
        """World-state adjacency: the one-step comes-before graph."""
        adjacency: dict[str, set[str]] = {}
        for (vertex, _action), _obs, target in self.outcome_edges:
            adjacency.setdefault(vertex[1], set()).add(target[1])
        return adjacency

    def comes_before_cycles(self) -> list[tuple[str, ...]]:
        """Canonical simple cycles of the projection, shortest first."""
        return _graphs.simple_cycles(self.projection(), self.world_states())


@dataclass(frozen=True)
class Representative:
    """One crossover-free restriction of the input plan."""

    igraph: IGraph
    plan: Plan
    operative: OperativeActionSet


def build_igraph(plan: Plan, world: World) -> IGraph:
    """Breadth-first closure of plan-state sets against world states.

    From each initial world state, the initiating vertex enters the plan
    layer on that state's observation; plan-layer vertices merge every
    plan state consistent with the same observable history at the same
    world state, so revisits of one world state become explicit in the
    projection.
    """
    report = solves(plan, world)
    if not report.verdict:
        raise NotASolution(report)

    init_edges: set[tuple[str, PlanKey]] = set()
    queue: list[PlanKey] = []
    seen: set[PlanKey] = set()
    for start in sorted(world.initial_states, key=lambda w: (world.obs_label[w], w)):
        obs = world.obs_label[start]
        entered = frozenset(
            q for p0 in plan.initial_states for q in plan.successors(p0, obs)
        )
        if not entered:
            continue
        key: PlanKey = (entered, start)
        init_edges.add((obs, key))
        if key not in seen:
            seen.add(key)
            queue.append(key)

    action_edges: set[ActionEdge] = set()
    outcome_edges: set[OutcomeEdge] = set()
    index = 0
    while index < len(queue):
        vertex = queue[index]
        index += 1
        states, w = vertex
        offered = sorted({a for p in states for a in plan.action_label[p]})
        for action in offered:
            if not world.step(w, action):
                continue  # not available here; unreachable for solutions
            world_vertex: WorldKey = (vertex, action)
            action_edges.add(world_vertex)
            taking = [p for p in states if action in plan.action_label[p]]
            for wt in sorted(world.step(w, action)):
                obs = world.obs_label[wt]
                entered = frozenset(
                    q for p in taking for q in plan.successors(p, obs)
                )
                if not entered:
                    continue
                target: PlanKey = (entered, wt)
                outcome_edges.add((world_vertex, obs, target))
                if target not in seen:
                    seen.add(target)
                    queue.append(target)

    return IGraph(
        init_edges=frozenset(init_edges),
        plan_vertices=frozenset(seen),
        action_edges=frozenset(action_edges),
        outcome_edges=frozenset(outcome_edges),
        actions=world.actions,
        observations=world.observations,
        goal_states=world.goal_states,
    )


def _restrict_reachable(igraph: IGraph) -> IGraph:
    """Drop vertices and edges not reachable from the initiating layer."""
    adjacency: dict[PlanKey, set[PlanKey]] = {}
    for (vertex, _action), _obs, target in igraph.outcome_edges:
        adjacency.setdefault(vertex, set()).add(target)
    roots = {key for _obs, key in igraph.init_edges}
    reachable = _graphs.reachable_from(adjacency, roots)
    return IGraph(
        init_edges=igraph.init_edges,
        plan_vertices=frozenset(reachable),
        action_edges=frozenset(
            (v, a) for (v, a) in igraph.action_edges if v in reachable
        ),
        outcome_edges=frozenset(
            e for e in igraph.outcome_edges if e[0][0] in reachable
        ),
        actions=igraph.actions,
        observations=igraph.observations,
        goal_states=igraph.goal_states,
    )


def _remove_edges(igraph: IGraph, removed: Iterable[ActionEdge]) -> IGraph:
    removed = set(removed)
    kept_actions = frozenset(e for e in igraph.action_edges if e not in removed)
    return _restrict_reachable(
        IGraph(
            init_edges=igraph.init_edges,
            plan_vertices=igraph.plan_vertices,
            action_edges=kept_actions,
            outcome_edges=frozenset(
                e for e in igraph.outcome_edges if e[0] in kept_actions
            ),
            actions=igraph.actions,
            observations=igraph.observations,
            goal_states=igraph.goal_states,
        )
    )


def candidate_edges(
    igraph: IGraph, cycle: Sequence[PlanKey]
) -> frozenset[ActionEdge]:
    """Action edges eligible for removal to break ``cycle``.

    ``cycle`` lists the plan-layer vertices whose world states form a
    comes-before cycle.  Eligible edges move between world states of the
    cycle and leave a world state that still has more than one outgoing
    action (removing a sole action would strand that state).
    """
    cycle_states = {key[1] for key in cycle}
    candidates: set[ActionEdge] = set()
    for edge in igraph.action_edges:
        vertex, action = edge
        if vertex[1] not in cycle_states:
            continue
        if len(igraph.world_actions(vertex[1])) <= 1:
            continue
        outcomes = igraph.outcomes_of(edge)
        if any(target[1] in cycle_states for _obs, target in outcomes):
            candidates.add(edge)
    return frozenset(candidates)


def representative_plan(igraph: IGraph) -> Plan:
    """Rebuild a plan from an accepted interaction graph.

    One plan state per plan-layer vertex labeled with its outgoing
    actions; world-layer outcomes become observation edges; a fresh
    initial state carries the initiating layer; goal-keyed vertices with
    no outgoing actions terminate.
    """
    ordered = sorted(igraph.plan_vertices, key=_key_order)
    names = {key: f"q{i}" for i, key in enumerate(ordered)}
    init = "init"

    action_label: dict[str, frozenset[str]] = {init: frozenset()}
    terminating: set[str] = set()
    for key in ordered:
        actions = frozenset(igraph.actions_at(key))
        action_label[names[key]] = actions
        if not actions:
            if key[1] not in igraph.goal_states:
                raise InvariantViolation(
                    f"non-goal vertex {key!r} has no outgoing actions"
                )
            terminating.add(names[key])

    labels: dict[tuple[str, str], set[str]] = {}
    for obs, key in igraph.init_edges:
        labels.setdefault((init, names[key]), set()).add(obs)
    for (vertex, _action), obs, target in igraph.outcome_edges:
        labels.setdefault((names[vertex], names[target]), set()).add(obs)
    edges = frozenset(
        Edge(src, dst, frozenset(obs_set)) for (src, dst), obs_set in labels.items()
    )

    return Plan(
        states=frozenset(names.values()) | {init},
        initial_states=frozenset({init}),
        terminating_states=frozenset(terminating),
        actions=igraph.actions,
        observations=igraph.observations,
        action_label=action_label,
        edges=edges,
    )


def _goal_unreachable(igraph: IGraph) -> bool:
    adjacency = igraph.projection()
    closure = _graphs.transitive_closure(adjacency, igraph.world_states())
    for state in igraph.world_states():
        if state in igraph.goal_states:
            continue
        if not any(state == a and b in igraph.goal_states for a, b in closure):
            return True
    return False


def _leaf_representative(igraph: IGraph, world: World) -> Representative | None:
    # Clipping can leave a reachable vertex with no actions while its
    # world state still acts at other vertices; the vertex-structural
    # reconstruction cannot express that, so fall back to realizing the
    # leaf's operative action set as a memoryless plan.
    plan: Plan | None = None
    stranded = any(
        not igraph.actions_at(key) and key[1] not in igraph.goal_states
        for key in igraph.plan_vertices
    )
    if not stranded:
        plan = representative_plan(igraph)
        if not solves(plan, world).verdict:
            plan = None
    if plan is None:
        assignment = {
            state: actions
            for state, actions in igraph.operative().entries
            if state not in world.goal_states
        }
        if not all(assignment.values()):
            return None
        plan = policy_plan(world, assignment)
        if not solves(plan, world).verdict:
            return None
    try:
        compute_progress_measure(plan, world)
    except CrossoverError:
        return None
    return Representative(
        igraph=igraph, plan=plan, operative=operative_action_set(plan, world)
    )


def clip(plan: Plan, world: World) -> tuple[Representative, ...]:
    """Enumerate every crossover-free representative of ``plan``.

    Depth-first search over candidate-edge removals: each node picks one
    unresolved comes-before cycle and branches on every subset of its
    candidate edges (the empty choice defers the cycle).  Nodes that
    strand a world state away from the goal, or contain an unbreakable
    cycle, are pruned.  Accepted leaves are deduplicated by operative
    action set and returned in canonical order.
    """
    base = _restrict_reachable(build_igraph(plan, world))
    accepted: dict[tuple, Representative] = {}
    visited: set[tuple] = set()
    stack: list[tuple[IGraph, frozenset[tuple[str, ...]]]] = [(base, frozenset())]
    while stack:
        igraph, deferred = stack.pop()
        node_key = (igraph.action_edges, deferred)
        if node_key in visited:
            continue
        visited.add(node_key)
        if _goal_unreachable(igraph):
            continue
        cycles = igraph.comes_before_cycles()
        vertex_lists = {
            cycle: [v for state in cycle for v in igraph.vertices_at(state)]
            for cycle in cycles
        }
        if any(not candidate_edges(igraph, vertex_lists[c]) for c in cycles):
            continue  # an unbreakable cycle can never be resolved
        unresolved = [c for c in cycles if c not in deferred]
        if not unresolved:
            if cycles:
                continue  # every remaining cycle was deferred away: reject
            rep = _leaf_representative(igraph, world)
            if rep is not None:
                key = rep.operative.canonical()
                if key not in accepted:
                    accepted[key] = rep
            continue
        cycle = unresolved[0]
        candidates = sorted(
            candidate_edges(igraph, vertex_lists[cycle]), key=_action_edge_order
        )
        stack.append((igraph, deferred | {cycle}))
        for size in range(1, len(candidates) + 1):
            for subset in itertools.combinations(candidates, size):
                stack.append((_remove_edges(igraph, subset), frozenset()))
    if not accepted:
        raise NoRepresentative("every clipping branch was pruned")
    return tuple(accepted[key] for key in sorted(accepted))


def is_derived_from(candidate: Plan, base: Plan, world: World) -> bool:
    """True iff candidate's operative action set is pointwise contained in base's."""
    return operative_action_set(candidate, world).issubset_of(
        operative_action_set(base, world)
    )


def policy_plan(world: World, assignment: Mapping[str, Iterable[str]]) -> Plan:
    """Materialize a per-state action assignment as a memoryless plan.

    One plan state per non-goal world state labeled with its assigned
    actions; outcomes route to the state of the world state reached;
    goal states map to a shared terminating state.
    """
    (goal_names, other) = (world.goal_states, sorted(world.states - world.goal_states))
    missing = [v for v in other if not assignment.get(v)]
    if missing:
        raise InvariantViolation(f"assignment missing non-goal states: {missing}")

    def name(state: str) -> str:
        return "done" if state in goal_names else f"at_{state}"

    states = {"init", "done"} | {name(v) for v in other}
    action_label: dict[str, frozenset[str]] = {"init": frozenset(), "done": frozenset()}
    labels: dict[tuple[str, str], set[str]] = {}
    for v in sorted(world.initial_states, key=lambda w: (world.obs_label[w], w)):
        labels.setdefault(("init", name(v)), set()).add(world.obs_label[v])
    for v in other:
        actions = frozenset(assignment[v])
        action_label[name(v)] = actions
        for action in sorted(actions):
            for wt in sorted(world.step(v, action)):
                labels.setdefault((name(v), name(wt)), set()).add(world.obs_label[wt])
    edges = frozenset(
        Edge(src, dst, frozenset(obs_set)) for (src, dst), obs_set in labels.items()
    )
    return Plan(
        states=frozenset(states),
        initial_states=frozenset({"init"}),
        terminating_states=frozenset({"done"}),
        actions=world.actions,
        observations=world.observations,
        action_label=action_label,
        edges=edges,
    )


def oracle_all_subplans(
    plan: Plan, world: World, cap: int = 2**20
) -> frozenset[OperativeActionSet]:
    """Exhaustively enumerate solution-set members below ``plan``.

    Every pointwise non-empty restriction of the plan's operative action
    set is materialized as a memoryless plan; those that solve the world
    and admit a progress measure are returned.  This is the brute-force
    mirror of clip() used to validate its completeness.
    """
    base = operative_action_set(plan, world)
    choice_states = [
        (state, sorted(actions))
        for state, actions in base.entries
        if state not in world.goal_states and actions
    ]
    total = 1
    for _state, actions in choice_states:
        total *= 2 ** len(actions) - 1
        if total > cap:
            raise CapExceeded(f"{total}+ operative subsets exceed the cap of {cap}")

    def non_empty_subsets(actions: list[str]) -> list[frozenset[str]]:
        out = []
        for size in range(1, len(actions) + 1):
            out.extend(frozenset(c) for c in itertools.combinations(actions, size))
        return out

    results: set[OperativeActionSet] = set()
    pools = [non_empty_subsets(actions) for _state, actions in choice_states]
    for combo in itertools.product(*pools):
        assignment = {state: combo[i] for i, (state, _) in enumerate(choice_states)}
        candidate = policy_plan(world, assignment)
        if not solves(candidate, world).verdict:
            continue
        try:
            compute_progress_measure(candidate, world)
        except CrossoverError:
            continue
        full = dict(assignment)
        for state in world.states:
            full.setdefault(state, frozenset())
        results.add(OperativeActionSet.from_mapping(full))
    return frozenset(results)
