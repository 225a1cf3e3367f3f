"""Core immutable types: worlds, plans, executions, and execution tracing.

A world is a labeled digraph of environment states (observations on
vertices, action sets on edges); a plan is its dual (action sets on
vertices, observation sets on edges).  Executions are alternating
observation/action sequences that can be replayed over either structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .exceptions import (
    ActionNotOffered,
    AmbiguousTrace,
    DeadTrace,
    InvariantViolation,
    NoInitialMatch,
)


def _freeze(items: Iterable[str], what: str) -> frozenset[str]:
    out = frozenset(items)
    for item in out:
        if not isinstance(item, str) or not item:
            raise InvariantViolation(f"{what} must be non-empty strings, got {item!r}")
    return out


@dataclass(frozen=True)
class Edge:
    """One labeled transition.

    ``labels`` holds actions for world edges and observations for plan
    edges; it is never empty.
    """

    source: str
    target: str
    labels: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", frozenset(self.labels))
        if not self.labels:
            raise InvariantViolation(
                f"edge {self.source!r}->{self.target!r} has an empty label set"
            )

    def sort_key(self) -> tuple:
        return (self.source, self.target, tuple(sorted(self.labels)))


def _check_edges(
    edges: frozenset[Edge], states: frozenset[str], alphabet: frozenset[str], what: str
) -> None:
    for edge in edges:
        if edge.source not in states:
            raise InvariantViolation(f"edge source {edge.source!r} is not a declared state")
        if edge.target not in states:
            raise InvariantViolation(f"edge target {edge.target!r} is not a declared state")
        for label in edge.labels:
            if label not in alphabet:
                raise InvariantViolation(
                    f"edge {edge.source!r}->{edge.target!r} uses undeclared {what} {label!r}"
                )


@dataclass(frozen=True, eq=True)
class World:
    """A planning problem: states with observations, edges with action sets."""

    states: frozenset[str]
    initial_states: frozenset[str]
    goal_states: frozenset[str]
    observations: frozenset[str]
    actions: frozenset[str]
    edges: frozenset[Edge]
    obs_label: Mapping[str, str]
    _step: dict = field(init=False, repr=False, compare=False)
    _by_obs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", _freeze(self.states, "states"))
        object.__setattr__(self, "initial_states", frozenset(self.initial_states))
        object.__setattr__(self, "goal_states", frozenset(self.goal_states))
        object.__setattr__(self, "observations", _freeze(self.observations, "observations"))
        object.__setattr__(self, "actions", _freeze(self.actions, "actions"))
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "obs_label", dict(self.obs_label))

        if not self.initial_states <= self.states:
            raise InvariantViolation("initial states must be a subset of states")
        if not self.goal_states <= self.states:
            raise InvariantViolation("goal states must be a subset of states")
        missing = self.states - self.obs_label.keys()
        if missing:
            raise InvariantViolation(f"states without an observation label: {sorted(missing)}")
        stray = self.obs_label.keys() - self.states
        if stray:
            raise InvariantViolation(f"observation labels for unknown states: {sorted(stray)}")
        for state, obs in self.obs_label.items():
            if obs not in self.observations:
                raise InvariantViolation(
                    f"state {state!r} labeled with undeclared observation {obs!r}"
                )
        _check_edges(self.edges, self.states, self.actions, "action")

        step: dict[tuple[str, str], set[str]] = {}
        for edge in self.edges:
            for action in edge.labels:
                step.setdefault((edge.source, action), set()).add(edge.target)
        object.__setattr__(self, "_step", {k: frozenset(v) for k, v in step.items()})
        by_obs: dict[str, list[str]] = {}
        for state in self.states:
            by_obs.setdefault(self.obs_label[state], []).append(state)
        object.__setattr__(self, "_by_obs", {k: tuple(sorted(v)) for k, v in by_obs.items()})

    def step(self, state: str, action: str) -> frozenset[str]:
        """States reachable from ``state`` by one edge carrying ``action``."""
        return self._step.get((state, action), frozenset())

    def available_actions(self, state: str) -> frozenset[str]:
        """Actions labeling at least one outgoing edge of ``state``."""
        return frozenset(a for (s, a) in self._step if s == state)

    def states_with_obs(self, observation: str) -> tuple[str, ...]:
        return self._by_obs.get(observation, ())

    def moves(self) -> Iterator[tuple[str, str, str]]:
        """Expansion view: one (source, action, target) triple per label."""
        for edge in sorted(self.edges, key=Edge.sort_key):
            for action in sorted(edge.labels):
                yield (edge.source, action, edge.target)


@dataclass(frozen=True, eq=True)
class Plan:
    """A strategy: states with action sets, edges with observation sets.

    Only initial and terminating states carry the empty action set; an
    agent obtains one observation before its first action and stops
    acting once a terminating state is entered.
    """

    states: frozenset[str]
    initial_states: frozenset[str]
    terminating_states: frozenset[str]
    actions: frozenset[str]
    observations: frozenset[str]
    action_label: Mapping[str, frozenset[str]]
    edges: frozenset[Edge]
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", _freeze(self.states, "states"))
        object.__setattr__(self, "initial_states", frozenset(self.initial_states))
        object.__setattr__(self, "terminating_states", frozenset(self.terminating_states))
        object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "observations", _freeze(self.observations, "observations"))
        object.__setattr__(
            self, "action_label", {k: frozenset(v) for k, v in dict(self.action_label).items()}
        )
        object.__setattr__(self, "edges", frozenset(self.edges))

        if not self.initial_states <= self.states:
            raise InvariantViolation("initial states must be a subset of states")
        if not self.terminating_states <= self.states:
            raise InvariantViolation("terminating states must be a subset of states")
        if self.action_label.keys() != set(self.states):
            raise InvariantViolation("action_label must be total over plan states")
        passive = self.initial_states | self.terminating_states
        for state, label in self.action_label.items():
            if not label <= self.actions:
                raise InvariantViolation(f"state {state!r} labeled with undeclared actions")
            if state in passive and label:
                raise InvariantViolation(
                    f"initial/terminating state {state!r} must have an empty action set"
                )
            if state not in passive and not label:
                raise InvariantViolation(
                    f"state {state!r} has an empty action set but is neither initial nor terminating"
                )
        _check_edges(self.edges, self.states, self.observations, "observation")
        for edge in self.edges:
            if edge.source in self.terminating_states:
                raise InvariantViolation(
                    f"terminating state {edge.source!r} has an outgoing edge"
                )

        succ: dict[tuple[str, str], set[str]] = {}
        for edge in self.edges:
            for obs in edge.labels:
                succ.setdefault((edge.source, obs), set()).add(edge.target)
        object.__setattr__(self, "_succ", {k: frozenset(v) for k, v in succ.items()})

    def successors(self, state: str, observation: str) -> frozenset[str]:
        """Plan states entered from ``state`` on ``observation``."""
        return self._succ.get((state, observation), frozenset())

    def moves(self) -> Iterator[tuple[str, str, str]]:
        """Expansion view: one (source, observation, target) triple per label."""
        for edge in sorted(self.edges, key=Edge.sort_key):
            for obs in sorted(edge.labels):
                yield (edge.source, obs, edge.target)


@dataclass(frozen=True)
class Execution:
    """An alternating sequence y0 u1 y1 ... yn, starting and ending with an observation."""

    observations: tuple[str, ...]
    actions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "observations", tuple(self.observations))
        object.__setattr__(self, "actions", tuple(self.actions))
        if len(self.observations) != len(self.actions) + 1:
            raise InvariantViolation(
                "an execution needs exactly one more observation than actions"
            )

    @classmethod
    def from_string(cls, text: str) -> "Execution":
        """Parse a space-separated "y0 u1 y1 ..." string."""
        tokens = text.split()
        if not tokens:
            raise InvariantViolation("an execution needs at least one observation")
        return cls(tuple(tokens[0::2]), tuple(tokens[1::2]))

    def __str__(self) -> str:
        parts = [self.observations[0]]
        for action, obs in self.steps():
            parts.append(action)
            parts.append(obs)
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.actions)

    def steps(self) -> Iterator[tuple[str, str]]:
        """Pairs (u_i, y_i) in order."""
        return zip(self.actions, self.observations[1:])

    def prefix(self, n_actions: int) -> "Execution":
        """The prefix taking the first ``n_actions`` actions."""
        return Execution(self.observations[: n_actions + 1], self.actions[:n_actions])

    def extend(self, action: str, observation: str) -> "Execution":
        return Execution(self.observations + (observation,), self.actions + (action,))

    def is_prefix_of(self, other: "Execution") -> bool:
        return (
            len(self) <= len(other)
            and other.observations[: len(self.observations)] == self.observations
            and other.actions[: len(self.actions)] == self.actions
        )


@dataclass(frozen=True)
class TraceResult:
    """Vertex reached by a trace, plus the vertex visited per observation."""

    reached: str
    path: tuple[str, ...]


@dataclass(frozen=True)
class ScopeReport:
    """Pass/fail per supported-scope condition."""

    single_goal: bool
    starts_anywhere: bool
    fully_observable: bool

    @property
    def ok(self) -> bool:
        return self.single_goal and self.starts_anywhere and self.fully_observable


def check_scope(world: World) -> ScopeReport:
    """Report whether ``world`` is within the supported scope.

    Supported worlds have exactly one goal state, may start anywhere
    (initial states = all states), and are fully observable (the
    observation labeling is injective).
    """
    return ScopeReport(
        single_goal=len(world.goal_states) == 1,
        starts_anywhere=world.initial_states == world.states,
        fully_observable=len(set(world.obs_label.values())) == len(world.states),
    )


def trace_world(execution: Execution, world: World) -> TraceResult:
    """Replay ``execution`` over ``world`` and return the vertex reached.

    Starts at the initial state labeled with the first observation and
    follows edges carrying each action; when an action admits several
    successors, the following observation picks the one consistent with
    it.  Raises NoInitialMatch, DeadTrace, or AmbiguousTrace when no (or
    no unique) consistent vertex exists.
    """
    first = execution.observations[0]
    starts = sorted(v for v in world.initial_states if world.obs_label[v] == first)
    if not starts:
        raise NoInitialMatch(f"no initial world state is labeled {first!r}")
    if len(starts) > 1:
        raise AmbiguousTrace(f"several initial world states are labeled {first!r}")
    current = starts[0]
    path = [current]
    for action, obs in execution.steps():
        successors = sorted(
            t for t in world.step(current, action) if world.obs_label[t] == obs
        )
        if not successors:
            raise DeadTrace(
                f"no edge from {current!r} matches action {action!r} and observation {obs!r}"
            )
        if len(successors) > 1:
            raise AmbiguousTrace(
                f"states {successors} from {current!r} share action {action!r} "
                f"and observation {obs!r}"
            )
        current = successors[0]
        path.append(current)
    return TraceResult(reached=current, path=tuple(path))


def trace_plan(execution: Execution, plan: Plan) -> TraceResult:
    """Replay ``execution`` over ``plan``; the dual of trace_world.

    Edges consume observations and vertices supply actions: each action
    in the execution must be offered by the current plan state.  When an
    observation admits several successor states, the following action
    disambiguates; if it cannot, AmbiguousTrace is raised.  The path
    holds the plan state occupied after each observation (the silent
    initial vertex is not included).
    """
    first = execution.observations[0]
    candidates: set[str] = set()
    for start in plan.initial_states:
        candidates |= plan.successors(start, first)
    if not candidates:
        raise NoInitialMatch(f"no initial plan edge accepts observation {first!r}")
    path: list[str] = []
    for action, obs in execution.steps():
        offering = sorted(p for p in candidates if action in plan.action_label[p])
        if not offering:
            raise ActionNotOffered(
                f"action {action!r} is not offered at plan state(s) {sorted(candidates)}"
            )
        if len(offering) > 1:
            raise AmbiguousTrace(
                f"plan states {offering} both fit the execution at action {action!r}"
            )
        state = offering[0]
        path.append(state)
        candidates = set(plan.successors(state, obs))
        if not candidates:
            raise DeadTrace(f"no plan edge from {state!r} accepts observation {obs!r}")
    remaining = sorted(candidates)
    if len(remaining) > 1:
        raise AmbiguousTrace(
            f"plan states {remaining} are all consistent with the final observation"
        )
    path.append(remaining[0])
    return TraceResult(reached=remaining[0], path=tuple(path))
