"""Progress cones, action-based sensors, and realizability checks.

Given a measured plan, the cone relation pairs each observation with the
actions guaranteed to decrease the measure from the state it labels.
Singleton sensors pick one such action per observation; permissive
sensors keep a non-empty subset.  Either kind induces a partition of the
world states (states sharing a prescription share a cell), which can be
checked against a physical indistinguishability constraint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .clip import clip
from .exceptions import (
    EmptySelection,
    InvalidMeasure,
    InvariantViolation,
    NotACovering,
    PartitionMismatch,
    SelectionOutsideCone,
)
from .model import Plan, World
from .progress import (
    ProgressMeasure,
    compute_progress_measure,
    operative_action_set,
    verify_progress_measure,
)


@dataclass(frozen=True)
class ConeRelation:
    """Observation-action pairs that make guaranteed progress.

    ``pairs`` ranges over every world action that strictly decreases the
    measure from the labeled state (all outcomes count); the
    ``operative_pairs`` sub-relation keeps only actions the plan itself
    may take there.  ``domain`` is the set of non-goal observations the
    relation must cover.
    """

    domain: frozenset[str]
    pairs: frozenset[tuple[str, str]]
    operative_pairs: frozenset[tuple[str, str]]

    def actions_for(self, observation: str) -> frozenset[str]:
        return frozenset(u for y, u in self.pairs if y == observation)

    def cone(self, action: str) -> frozenset[str]:
        """The progress cone of ``action``: observations it progresses from."""
        return frozenset(y for y, u in self.pairs if u == action)

    def covering(self) -> bool:
        return all(self.actions_for(y) for y in self.domain)


@dataclass(frozen=True)
class SingletonSensor:
    """Total map from non-goal observations to one progress-making action."""

    entries: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "SingletonSensor":
        return cls(tuple(sorted(mapping.items())))

    def __getitem__(self, observation: str) -> str:
        for y, u in self.entries:
            if y == observation:
                return u
        raise KeyError(observation)

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)


@dataclass(frozen=True)
class PermissiveSensor:
    """Total map from non-goal observations to non-empty action sets."""

    entries: tuple[tuple[str, frozenset[str]], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "PermissiveSensor":
        return cls(tuple(sorted((y, frozenset(us)) for y, us in mapping.items())))

    def __getitem__(self, observation: str) -> frozenset[str]:
        for y, us in self.entries:
            if y == observation:
                return us
        raise KeyError(observation)

    def as_dict(self) -> dict[str, frozenset[str]]:
        return dict(self.entries)


@dataclass(frozen=True)
class SensorPartition:
    """World states grouped by prescribed action set.

    The goal cell carries the empty prescription (a distinguished
    terminal marker); every other cell is keyed by the actions its
    states prescribe.
    """

    by_state: tuple[tuple[str, frozenset[str]], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "SensorPartition":
        return cls(tuple(sorted((s, frozenset(us)) for s, us in mapping.items())))

    def states(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.by_state)

    def cell_of(self, state: str) -> frozenset[str]:
        for s, cell in self.by_state:
            if s == state:
                return cell
        raise KeyError(state)

    def cells(self) -> dict[frozenset[str], frozenset[str]]:
        """Prescription -> states carrying it."""
        out: dict[frozenset[str], set[str]] = {}
        for state, cell in self.by_state:
            out.setdefault(cell, set()).add(state)
        return {k: frozenset(v) for k, v in out.items()}


@dataclass(frozen=True)
class IndistinguishabilityConstraint:
    """A partition of world states into perceptual classes."""

    classes: frozenset[frozenset[str]]

    def __post_init__(self) -> None:
        classes = frozenset(frozenset(c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        seen: set[str] = set()
        for cls_ in classes:
            if not cls_:
                raise InvariantViolation("constraint classes must be non-empty")
            if seen & cls_:
                raise InvariantViolation("constraint classes must be disjoint")
            seen |= cls_

    def states(self) -> frozenset[str]:
        return frozenset(s for c in self.classes for s in c)


def cone_relation(measure: ProgressMeasure, plan: Plan, world: World) -> ConeRelation:
    """Build the cone relation of ``plan`` under ``measure``.

    (y, u) is included iff u labels an outgoing edge of the state
    observed as y and every u-successor has a strictly smaller measure;
    nondeterministic actions only enter when all outcomes progress.
    """
    checked = verify_progress_measure(measure, plan, world)
    if not checked.ok:
        raise InvalidMeasure(f"measure fails condition {checked.condition}: {checked.detail}")
    operative = operative_action_set(plan, world)
    domain: set[str] = set()
    pairs: set[tuple[str, str]] = set()
    operative_pairs: set[tuple[str, str]] = set()
    for state in sorted(world.states - world.goal_states):
        obs = world.obs_label[state]
        domain.add(obs)
        for action in sorted(world.available_actions(state)):
            outcomes = world.step(state, action)
            if all(measure[t] < measure[state] for t in outcomes):
                pairs.add((obs, action))
                if action in operative[state]:
                    operative_pairs.add((obs, action))
    return ConeRelation(
        domain=frozenset(domain),
        pairs=frozenset(pairs),
        operative_pairs=frozenset(operative_pairs),
    )


def enumerate_singleton_sensors(relation: ConeRelation) -> Iterator[SingletonSensor]:
    """Yield every singleton sensor in lexicographic order.

    The stream walks the product of per-observation action choices over
    sorted observations, then sorted actions, so sensor indices are
    stable identifiers; the total count is the product of cone sizes.
    """
    observations = sorted(relation.domain)
    uncovered = [y for y in observations if not relation.actions_for(y)]
    if uncovered:
        raise NotACovering(f"observations with no progress-making action: {uncovered}")
    pools = [sorted(relation.actions_for(y)) for y in observations]
    for combo in itertools.product(*pools):
        yield SingletonSensor(tuple(zip(observations, combo)))


def count_singleton_sensors(relation: ConeRelation) -> int:
    count = 1
    for y in sorted(relation.domain):
        count *= len(relation.actions_for(y))
    return count


def permissive_sensor(
    relation: ConeRelation, selection: Mapping[str, Iterable[str]] | None = None
) -> PermissiveSensor:
    """Validate a per-observation action selection against the relation.

    With no selection the maximal sensor (the full cone slice per
    observation) is returned.
    """
    if selection is None:
        selection = {y: relation.actions_for(y) for y in relation.domain}
    chosen: dict[str, frozenset[str]] = {}
    for y in sorted(relation.domain):
        actions = frozenset(selection.get(y, frozenset()))
        if not actions:
            raise EmptySelection(f"no action selected for observation {y!r}")
        extra = actions - relation.actions_for(y)
        if extra:
            raise SelectionOutsideCone(
                f"selection for {y!r} leaves the cone relation: {sorted(extra)}"
            )
        chosen[y] = actions
    return PermissiveSensor.from_mapping(chosen)


def operative_sensor(plan: Plan, world: World) -> PermissiveSensor:
    """The plan's own prescription as a permissive sensor.

    Selects, per observation, exactly the operative actions of the state
    it labels; this is the sensor a plan describes directly.
    """
    measure = compute_progress_measure(plan, world)
    relation = cone_relation(measure, plan, world)
    operative = operative_action_set(plan, world)
    selection = {
        world.obs_label[state]: operative[state]
        for state in world.states - world.goal_states
    }
    return permissive_sensor(relation, selection)


def to_partition(
    sensor: SingletonSensor | PermissiveSensor, world: World
) -> SensorPartition:
    """Relabel world states by their prescribed action set.

    Goal states land in the distinguished terminal cell (empty
    prescription).
    """
    mapping: dict[str, frozenset[str]] = {}
    for state in sorted(world.states):
        if state in world.goal_states:
            mapping[state] = frozenset()
            continue
        obs = world.obs_label[state]
        try:
            prescribed = sensor[obs]
        except KeyError:
            raise NotACovering(f"sensor undefined on observation {obs!r}") from None
        if isinstance(prescribed, str):
            prescribed = frozenset({prescribed})
        mapping[state] = prescribed
    return SensorPartition.from_mapping(mapping)


def is_realizable(
    partition: SensorPartition, constraint: IndistinguishabilityConstraint
) -> tuple[bool, tuple[str, str] | None]:
    """True iff no perceptual class mixes states from different cells."""
    if partition.states() != constraint.states():
        raise PartitionMismatch(
            f"partition covers {sorted(partition.states())} "
            f"but constraint covers {sorted(constraint.states())}"
        )
    for cls_ in sorted(constraint.classes, key=lambda c: tuple(sorted(c))):
        members = sorted(cls_)
        for a, b in itertools.combinations(members, 2):
            if partition.cell_of(a) != partition.cell_of(b):
                return False, (a, b)
    return True, None


def all_sensors(plan: Plan, world: World) -> frozenset[ConeRelation]:
    """Every cone relation obtainable from the plan's representatives.

    Runs the clipping search, computes the canonical measure and cone
    relation per representative, and deduplicates; every singleton or
    permissive sensor for the plan family is derivable from some member.
    """
    relations: set[ConeRelation] = set()
    for rep in clip(plan, world):
        measure = compute_progress_measure(rep.plan, world)
        relations.add(cone_relation(measure, rep.plan, world))
    return frozenset(relations)
