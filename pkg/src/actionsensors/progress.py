"""Operative action sets, crossover conflicts, and progress measures.

A progress measure assigns every world state a non-negative value, zero
only at the goal, strictly decreasing along every joint-execution.  It
exists iff no two executions visit a pair of world states in opposite
orders (a crossover conflict), which in turn is equivalent to the
comes-before relation being acyclic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import _graphs
from .exceptions import CrossoverError, InvariantViolation, NotASolution
from .model import Execution, Plan, World, trace_world
from .validate import ProductGraph, joint_language, product_graph, solves


@dataclass(frozen=True)
class OperativeActionSet:
    """Per world state, the actions the plan may actually take there."""

    entries: tuple[tuple[str, frozenset[str]], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "OperativeActionSet":
        return cls(
            tuple(sorted((state, frozenset(actions)) for state, actions in mapping.items()))
        )

    def __getitem__(self, state: str) -> frozenset[str]:
        for name, actions in self.entries:
            if name == state:
                return actions
        raise KeyError(state)

    def as_dict(self) -> dict[str, frozenset[str]]:
        return dict(self.entries)

    def states(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def issubset_of(self, other: "OperativeActionSet") -> bool:
        theirs = other.as_dict()
        return all(actions <= theirs.get(state, frozenset()) for state, actions in self.entries)

    def canonical(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        """A totally ordered, hashable form for sorting and deduplication."""
        return tuple((state, tuple(sorted(actions))) for state, actions in self.entries)


@dataclass(frozen=True)
class ComesBefore:
    """Ordered pairs (a, b): some joint-execution visits a then later b."""

    pairs: frozenset[tuple[str, str]]

    def before(self, a: str, b: str) -> bool:
        return (a, b) in self.pairs

    @property
    def acyclic(self) -> bool:
        return not any(a == b for a, b in self.pairs)


@dataclass(frozen=True)
class ProgressMeasure:
    """Non-negative value per world state; zero exactly at the goal."""

    values: Mapping[str, int]

    def __post_init__(self) -> None:
        values = dict(self.values)
        for state, value in values.items():
            if not isinstance(value, int) or value < 0:
                raise InvariantViolation(
                    f"measure value for {state!r} must be a non-negative integer"
                )
        object.__setattr__(self, "values", values)

    def __getitem__(self, state: str) -> int:
        return self.values[state]

    def phi(self, states: Iterable[str]) -> int:
        """Lift to state sets: the maximum over members."""
        members = list(states)
        if not members:
            raise ValueError("phi is undefined on the empty set")
        return max(self.values[s] for s in members)


@dataclass(frozen=True)
class CrossoverConflict:
    """A state pair whose visitation order is forced both ways.

    Each witness is a chain of joint-executions deriving one order:
    usually a single execution visiting both states, but opposite orders
    can also be forced transitively across executions (each chain link
    visits the previous link's last state before its own).  For a
    degenerate conflict (a plan revisiting one world state) state_a ==
    state_b and the chains coincide.
    """

    state_a: str
    state_b: str
    witness_1: tuple[Execution, ...]
    witness_2: tuple[Execution, ...]


@dataclass(frozen=True)
class MeasureCheck:
    """Outcome of verifying a measure; condition in {'domain','a','b','c'}."""

    ok: bool
    condition: str | None = None
    detail: str | None = None
    witness: tuple[Execution, Execution] | None = None


def _require_solution(plan: Plan, world: World) -> ProductGraph:
    report = solves(plan, world)
    if not report.verdict:
        raise NotASolution(report)
    return product_graph(plan, world)


def _operative_from_product(product: ProductGraph, plan: Plan, world: World) -> OperativeActionSet:
    mapping: dict[str, set[str]] = {state: set() for state in world.states}
    for p, w in product.pairs:
        mapping[w] |= plan.action_label[p] & world.available_actions(w)
    return OperativeActionSet.from_mapping(mapping)


def operative_action_set(plan: Plan, world: World) -> OperativeActionSet:
    """Actions the plan may take per world state, over all joint-executions."""
    product = _require_solution(plan, world)
    return _operative_from_product(product, plan, world)


def _projection(product: ProductGraph) -> dict[str, set[str]]:
    adjacency: dict[str, set[str]] = {}
    for tr in product.transitions:
        adjacency.setdefault(tr.source[1], set()).add(tr.target[1])
    return adjacency


def comes_before(plan: Plan, world: World) -> ComesBefore:
    """Transitive visitation order of world states under the plan."""
    product = _require_solution(plan, world)
    adjacency = _projection(product)
    states = {w for _, w in product.pairs}
    return ComesBefore(frozenset(_graphs.transitive_closure(adjacency, states)))


def _execution_visiting(
    product: ProductGraph, first: str, then: str
) -> Execution | None:
    """A shortest joint-execution visiting world state ``first`` then ``then``."""
    sources = sorted(pair for pair in product.pairs if pair[1] == first)
    best: Execution | None = None
    for source in sources:
        # BFS from source to any pair at ``then``, at least one step out.
        frontier = [(source, product.witnesses[source])]
        seen = {source}
        while frontier:
            nxt: list[tuple[tuple[str, str], Execution]] = []
            for pair, execution in frontier:
                for tr in product.successors(pair):
                    extended = execution.extend(tr.action, tr.observation)
                    if tr.target[1] == then:
                        if best is None or (len(extended), str(extended)) < (
                            len(best),
                            str(best),
                        ):
                            best = extended
                    elif tr.target not in seen:
                        seen.add(tr.target)
                        nxt.append((tr.target, extended))
            frontier = nxt
    return best


def _shortest_projection_path(
    adjacency: dict[str, set[str]], first: str, then: str
) -> list[str]:
    parents: dict[str, str] = {}
    frontier = [first]
    seen = {first}
    while frontier:
        nxt: list[str] = []
        for node in frontier:
            for succ in sorted(adjacency.get(node, ())):
                if succ == then:
                    path = [then, node]
                    while path[-1] != first:
                        path.append(parents[path[-1]])
                    path.reverse()
                    return path
                if succ not in seen:
                    seen.add(succ)
                    parents[succ] = node
                    nxt.append(succ)
        frontier = nxt
    raise ValueError(f"no projection path from {first!r} to {then!r}")


def _one_step_witness(product: ProductGraph, first: str, then: str) -> Execution:
    best: Execution | None = None
    for pair in sorted(product.pairs):
        if pair[1] != first:
            continue
        for tr in product.successors(pair):
            if tr.target[1] != then:
                continue
            extended = product.witnesses[pair].extend(tr.action, tr.observation)
            if best is None or (len(extended), str(extended)) < (len(best), str(best)):
                best = extended
    assert best is not None, "one-step projection edge without a transition"
    return best


def _witness_chain(
    product: ProductGraph, adjacency: dict[str, set[str]], first: str, then: str
) -> tuple[Execution, ...]:
    direct = _execution_visiting(product, first, then)
    if direct is not None:
        return (direct,)
    path = _shortest_projection_path(adjacency, first, then)
    return tuple(_one_step_witness(product, x, y) for x, y in zip(path, path[1:]))


def find_crossovers(plan: Plan, world: World) -> list[CrossoverConflict]:
    """All crossover conflicts, one per unordered state pair in a cycle.

    A pair conflicts when the comes-before relation orders it both ways;
    the list is empty iff comes_before is acyclic.  Witness chains are
    single executions whenever one execution realizes the order, and
    hop-by-hop chains when the order is only forced transitively.  A
    comes-before self-loop with no partner state yields a degenerate
    conflict whose two states coincide.
    """
    product = _require_solution(plan, world)
    adjacency = _projection(product)
    states = {w for _, w in product.pairs}
    closure = _graphs.transitive_closure(adjacency, states)

    conflicts: list[CrossoverConflict] = []
    paired: set[str] = set()
    for a in sorted(states):
        for b in sorted(states):
            if a < b and (a, b) in closure and (b, a) in closure:
                w1 = _witness_chain(product, adjacency, a, b)
                w2 = _witness_chain(product, adjacency, b, a)
                conflicts.append(CrossoverConflict(a, b, w1, w2))
                paired.update((a, b))
    for a in sorted(states):
        # One-step self-transitions not already explained by a pair.
        if a in adjacency.get(a, ()) and a not in paired:
            witness = (_one_step_witness(product, a, a),)
            conflicts.append(CrossoverConflict(a, a, witness, witness))
    return conflicts


def compute_progress_measure(plan: Plan, world: World) -> ProgressMeasure:
    """The canonical measure: longest comes-before path down to the goal.

    Raises CrossoverError (carrying find_crossovers output) when the
    comes-before relation is cyclic and no measure exists.
    """
    product = _require_solution(plan, world)
    adjacency = _projection(product)
    states = {w for _, w in product.pairs}
    if _graphs.find_cycle(adjacency, states) is not None:
        raise CrossoverError(find_crossovers(plan, world))
    (goal,) = world.goal_states
    lengths = _graphs.longest_path_to(adjacency, states, goal)
    return ProgressMeasure({state: lengths[state] for state in states})


def verify_progress_measure(
    measure: ProgressMeasure, plan: Plan, world: World
) -> MeasureCheck:
    """Check a measure against the enumerated joint-execution language.

    Conditions: (a) only goal states take value zero, (b) some goal state
    takes value zero, (c) values strictly decrease along every
    consecutive prefix pair of every joint-execution.
    """
    _require_solution(plan, world)
    missing = sorted(world.states - measure.values.keys())
    if missing:
        return MeasureCheck(
            ok=False, condition="domain", detail=f"states without a value: {missing}"
        )
    for state in sorted(world.states):
        if measure[state] == 0 and state not in world.goal_states:
            return MeasureCheck(
                ok=False,
                condition="a",
                detail=f"non-goal state {state!r} has value 0",
            )
    if not any(measure[g] == 0 for g in world.goal_states):
        return MeasureCheck(ok=False, condition="b", detail="no goal state has value 0")
    language = joint_language(plan, world)
    checked: set[tuple[str, str]] = set()
    for execution in sorted(language.maximal, key=str):
        path = trace_world(execution, world).path
        for i in range(len(path) - 1):
            a, b = path[i], path[i + 1]
            if (a, b) in checked:
                continue
            checked.add((a, b))
            if not measure[a] > measure[b]:
                return MeasureCheck(
                    ok=False,
                    condition="c",
                    detail=(
                        f"value does not decrease from {a!r} ({measure[a]}) "
                        f"to {b!r} ({measure[b]})"
                    ),
                    witness=(execution.prefix(i), execution.prefix(i + 1)),
                )
    return MeasureCheck(ok=True)
