"""Deciding whether a plan solves a world.

A solution must be safe (never commands an unavailable action), receptive
(ready for every observation that can arise, from every start), finite
(all joint-executions bounded), and goal-terminating (every maximal
joint-execution ends with the plan terminating on the world's goal).
The synchronized product of plan and world underlies all checks; an
independent execution-enumeration oracle re-derives the same verdict for
use in testing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple

from . import _graphs
from .exceptions import AlphabetMismatch, NotFinite, ScopeViolation
from .model import Execution, Plan, World, check_scope

Pair = tuple[str, str]  # (plan state, world state)


class Transition(NamedTuple):
    source: Pair
    action: str
    observation: str
    target: Pair


@dataclass(frozen=True)
class ProductGraph:
    """Reachable joint configurations of a plan running on a world.

    Contains exactly the (plan state, world state) pairs reachable by
    joint-executions, with transitions labeled (action, observation).
    ``witnesses`` maps each pair to a shortest joint-execution reaching
    it (ties broken lexicographically on labels).
    """

    pairs: frozenset[Pair]
    initial_pairs: frozenset[Pair]
    transitions: tuple[Transition, ...]
    witnesses: Mapping[Pair, Execution] = field(compare=False)
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        out: dict[Pair, list[Transition]] = {}
        for tr in self.transitions:
            out.setdefault(tr.source, []).append(tr)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})

    def successors(self, pair: Pair) -> tuple[Transition, ...]:
        return self._out.get(pair, ())

    def adjacency(self) -> dict[Pair, set[Pair]]:
        adj: dict[Pair, set[Pair]] = {pair: set() for pair in self.pairs}
        for tr in self.transitions:
            adj[tr.source].add(tr.target)
        return adj


@dataclass(frozen=True)
class SolutionReport:
    """Verdict and per-constraint flags; counterexample present iff false."""

    safe: bool
    receptive: bool
    finite: bool
    reaches_goal: bool
    covers_initial: bool
    counterexample: Execution | None = None

    @property
    def verdict(self) -> bool:
        return (
            self.safe
            and self.receptive
            and self.finite
            and self.reaches_goal
            and self.covers_initial
        )

    def summary(self) -> str:
        flags = []
        for name in ("safe", "receptive", "finite", "reaches_goal", "covers_initial"):
            flags.append(f"{name}={'yes' if getattr(self, name) else 'NO'}")
        return ", ".join(flags)


@dataclass(frozen=True)
class JointLanguage:
    """All joint-executions; ``maximal`` end with (terminating, goal)."""

    executions: frozenset[Execution]
    maximal: frozenset[Execution]


def _check_alphabets(plan: Plan, world: World) -> None:
    extra_actions = plan.actions - world.actions
    if extra_actions:
        raise AlphabetMismatch(f"plan declares unknown actions: {sorted(extra_actions)}")
    extra_obs = plan.observations - world.observations
    if extra_obs:
        raise AlphabetMismatch(f"plan declares unknown observations: {sorted(extra_obs)}")


def product_graph(plan: Plan, world: World) -> ProductGraph:
    """Build the synchronized product of ``plan`` and ``world``.

    A transition (p, w) --(u, y)--> (p', w') exists iff the plan offers u
    at p, a world edge w -> w' carries u, w' is observed as y, and a plan
    edge p -> p' accepts y.
    """
    _check_alphabets(plan, world)
    witnesses: dict[Pair, Execution] = {}
    queue: list[Pair] = []
    for start in sorted(world.initial_states, key=lambda w: (world.obs_label[w], w)):
        first = world.obs_label[start]
        for p0 in sorted(plan.initial_states):
            for entered in sorted(plan.successors(p0, first)):
                pair = (entered, start)
                if pair not in witnesses:
                    witnesses[pair] = Execution((first,))
                    queue.append(pair)
    transitions: list[Transition] = []
    seen: set[tuple] = set()
    index = 0
    while index < len(queue):
        pair = queue[index]
        index += 1
        p, w = pair
        for action in sorted(plan.action_label[p]):
            # (action, observation) order so first-found witnesses break
            # length ties lexicographically on labels.
            for wt in sorted(world.step(w, action), key=lambda t: (world.obs_label[t], t)):
                obs = world.obs_label[wt]
                for pt in sorted(plan.successors(p, obs)):
                    target = (pt, wt)
                    key = (pair, action, obs, target)
                    if key in seen:
                        continue
                    seen.add(key)
                    transitions.append(Transition(pair, action, obs, target))
                    if target not in witnesses:
                        witnesses[target] = witnesses[pair].extend(action, obs)
                        queue.append(target)
    return ProductGraph(
        pairs=frozenset(witnesses),
        initial_pairs=frozenset(
            pair for pair in witnesses if len(witnesses[pair]) == 0
        ),
        transitions=tuple(sorted(transitions)),
        witnesses=witnesses,
    )


def _unsafe_at(product: ProductGraph, plan: Plan, world: World) -> tuple[Pair, str] | None:
    for pair in sorted(product.pairs):
        p, w = pair
        available = world.available_actions(w)
        for action in sorted(plan.action_label[p]):
            if action not in available:
                return pair, action
    return None


def is_safe(plan: Plan, world: World) -> tuple[bool, Execution | None]:
    """True iff no reachable configuration commands an unavailable action."""
    product = product_graph(plan, world)
    bad = _unsafe_at(product, plan, world)
    if bad is None:
        return True, None
    return False, product.witnesses[bad[0]]


def _unreceptive_at(
    product: ProductGraph, plan: Plan, world: World
) -> Execution | None:
    # Initial covering: every initial plan state must accept every
    # initial world observation.
    for start in sorted(world.initial_states, key=lambda w: (world.obs_label[w], w)):
        first = world.obs_label[start]
        for p0 in sorted(plan.initial_states):
            if not plan.successors(p0, first):
                return Execution((first,))
    for pair in sorted(product.pairs):
        p, w = pair
        for action in sorted(plan.action_label[p]):
            for wt in sorted(world.step(w, action), key=lambda t: (world.obs_label[t], t)):
                obs = world.obs_label[wt]
                if not plan.successors(p, obs):
                    return product.witnesses[pair].extend(action, obs)
    return None


def is_receptive(plan: Plan, world: World) -> tuple[bool, Execution | None]:
    """True iff the plan accepts every observation that can arise.

    Checked at every reachable configuration after every offered safe
    action, and for every initial world state's first observation.
    """
    product = product_graph(plan, world)
    witness = _unreceptive_at(product, plan, world)
    return (witness is None), witness


def _product_cycle(product: ProductGraph) -> tuple[Pair, ...] | None:
    return _graphs.find_cycle(product.adjacency(), product.pairs)


def is_finite_on(plan: Plan, world: World) -> tuple[bool, tuple[Pair, ...] | None]:
    """True iff all joint-executions have bounded length.

    Equivalent, on finite graphs, to the reachable product being acyclic;
    on failure the witnessing cycle of configurations is returned.
    """
    product = product_graph(plan, world)
    cycle = _product_cycle(product)
    return (cycle is None), cycle


def _terminal_failure(product: ProductGraph, plan: Plan, world: World) -> Pair | None:
    for pair in sorted(product.pairs):
        p, w = pair
        if not product.successors(pair):
            if p not in plan.terminating_states or w not in world.goal_states:
                return pair
    return None


def _covers_initial(plan: Plan, world: World) -> tuple[bool, Execution | None]:
    for start in sorted(world.initial_states, key=lambda w: (world.obs_label[w], w)):
        first = world.obs_label[start]
        if not any(plan.successors(p0, first) for p0 in sorted(plan.initial_states)):
            return False, Execution((first,))
    return True, None


def solves(plan: Plan, world: World) -> SolutionReport:
    """Full solution check; see the module docstring for the constraints.

    Raises ScopeViolation for worlds outside the supported scope.
    """
    scope = check_scope(world)
    if not scope.ok:
        raise ScopeViolation(scope)
    product = product_graph(plan, world)

    unsafe = _unsafe_at(product, plan, world)
    unreceptive = _unreceptive_at(product, plan, world)
    cycle = _product_cycle(product)
    bad_terminal = _terminal_failure(product, plan, world)
    covers, cover_witness = _covers_initial(plan, world)

    counterexample: Execution | None = None
    if unsafe is not None:
        counterexample = product.witnesses[unsafe[0]]
    elif unreceptive is not None:
        counterexample = unreceptive
    elif cycle is not None:
        counterexample = product.witnesses[cycle[0]]
    elif bad_terminal is not None:
        counterexample = product.witnesses[bad_terminal]
    elif not covers:
        counterexample = cover_witness
    return SolutionReport(
        safe=unsafe is None,
        receptive=unreceptive is None,
        finite=cycle is None,
        reaches_goal=bad_terminal is None,
        covers_initial=covers,
        counterexample=counterexample,
    )


def joint_language(plan: Plan, world: World) -> JointLanguage:
    """Exhaustively enumerate all joint-executions.

    Requires a finite language (NotFinite otherwise).  The executions set
    is prefix-closed; the maximal subset collects executions that end at
    a (terminating, goal) configuration.
    """
    product = product_graph(plan, world)
    if _product_cycle(product) is not None:
        raise NotFinite("the joint-execution language is unbounded")
    executions: set[Execution] = set()
    maximal: set[Execution] = set()

    def walk(pair: Pair, execution: Execution) -> None:
        executions.add(execution)
        p, w = pair
        if p in plan.terminating_states and w in world.goal_states:
            maximal.add(execution)
        for tr in product.successors(pair):
            walk(tr.target, execution.extend(tr.action, tr.observation))

    for pair in sorted(product.initial_pairs):
        walk(pair, product.witnesses[pair])
    return JointLanguage(executions=frozenset(executions), maximal=frozenset(maximal))


# --- independent oracle -----------------------------------------------------

Config = tuple[frozenset[str], str]  # (plan-state belief, world state)


@dataclass(frozen=True)
class OracleReport:
    """solves() recomputed by bounded execution enumeration.

    ``agree`` is True when every flag and the verdict match the library
    result; a False value indicates an internal defect.
    """

    library: SolutionReport
    safe: bool
    receptive: bool
    finite: bool
    reaches_goal: bool
    covers_initial: bool
    bound: int

    @property
    def verdict(self) -> bool:
        return (
            self.safe
            and self.receptive
            and self.finite
            and self.reaches_goal
            and self.covers_initial
        )

    @property
    def agree(self) -> bool:
        lib = self.library
        return (
            self.verdict == lib.verdict
            and self.safe == lib.safe
            and self.receptive == lib.receptive
            and self.finite == lib.finite
            and self.reaches_goal == lib.reaches_goal
            and self.covers_initial == lib.covers_initial
        )


def _plan_accepts(plan: Plan, state: str, obs: str) -> bool:
    return bool(plan.successors(state, obs))


def oracle_check(plan: Plan, world: World, cap: int | None = None) -> OracleReport:
    """Recompute solves() by raw execution semantics and compare.

    Executions are enumerated as belief states (sets of plan states
    consistent with the observable trace) with an explicit length bound
    of |plan states| x |world states| + 1 actions; hitting the bound, or
    revisiting a belief on the current branch, signals an unbounded
    language.  No product-graph code is used.
    """
    scope = check_scope(world)
    if not scope.ok:
        raise ScopeViolation(scope)
    library = solves(plan, world)
    bound = cap if cap is not None else len(plan.states) * len(world.states) + 1

    flags = {"safe": True, "receptive": True, "finite": True, "reaches_goal": True}

    covers_initial = True
    for start in sorted(world.initial_states):
        first = world.obs_label[start]
        if not any(_plan_accepts(plan, p0, first) for p0 in plan.initial_states):
            covers_initial = False
        for p0 in sorted(plan.initial_states):
            if not _plan_accepts(plan, p0, first):
                flags["receptive"] = False

    def inspect(config: Config) -> None:
        belief, w = config
        available = world.available_actions(w)
        for p in sorted(belief):
            label = plan.action_label[p]
            if p in plan.terminating_states:
                if w not in world.goal_states:
                    flags["reaches_goal"] = False
                continue
            extendable = False
            for action in sorted(label):
                if action not in available:
                    flags["safe"] = False
                    continue
                for wt in sorted(world.step(w, action)):
                    obs = world.obs_label[wt]
                    if _plan_accepts(plan, p, obs):
                        extendable = True
                    else:
                        flags["receptive"] = False
            if not extendable:
                # A maximal execution ends here without terminating.
                flags["reaches_goal"] = False

    def children(config: Config) -> Iterator[Config]:
        belief, w = config
        actions = sorted({a for p in belief for a in plan.action_label[p]})
        for action in actions:
            taking = [p for p in belief if action in plan.action_label[p]]
            for wt in sorted(world.step(w, action)):
                obs = world.obs_label[wt]
                nxt = frozenset(
                    q for p in taking for q in plan.successors(p, obs)
                )
                if nxt:
                    yield (nxt, wt)

    # A repeated belief along one branch, or a branch outrunning the
    # length bound, both pump arbitrarily long executions.  They only
    # mark non-finiteness: the remaining flags still range over every
    # reachable configuration, exactly like the library side.
    completed: set[Config] = set()
    inspected: set[Config] = set()

    def explore(config: Config, depth: int, on_path: set[Config]) -> None:
        if config in completed:
            return
        if config in on_path:
            flags["finite"] = False
            return
        if depth > bound:
            flags["finite"] = False
            return
        if config not in inspected:
            inspected.add(config)
            inspect(config)
        on_path.add(config)
        for child in children(config):
            explore(child, depth + 1, on_path)
        on_path.remove(config)
        completed.add(config)

    for start in sorted(world.initial_states):
        first = world.obs_label[start]
        belief = frozenset(
            q for p0 in plan.initial_states for q in plan.successors(p0, first)
        )
        if belief:
            explore((belief, start), 0, set())

    return OracleReport(
        library=library,
        safe=flags["safe"],
        receptive=flags["receptive"],
        finite=flags["finite"],
        reaches_goal=flags["reaches_goal"],
        covers_initial=covers_initial,
        bound=bound,
    )
