from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionsensors import (
    ActionNotOffered,
    AmbiguousTrace,
    DeadTrace,
    Edge,
    Execution,
    InvariantViolation,
    NoInitialMatch,
    Plan,
    World,
    check_scope,
    joint_language,
    trace_plan,
    trace_world,
)
from generators import random_world


def small_world(**overrides) -> World:
    fields = dict(
        states={"s_a", "s_b", "s_g"},
        initial_states={"s_a", "s_b", "s_g"},
        goal_states={"s_g"},
        observations={"a", "b", "g"},
        actions={"m"},
        edges={Edge("s_a", "s_b", frozenset({"m"})), Edge("s_b", "s_g", frozenset({"m"}))},
        obs_label={"s_a": "a", "s_b": "b", "s_g": "g"},
    )
    fields.update(overrides)
    return World(**fields)


class TestConstruction:
    def test_edge_rejects_empty_labels(self):
        with pytest.raises(InvariantViolation):
            Edge("a", "b", frozenset())

    def test_world_initial_must_be_states(self):
        with pytest.raises(InvariantViolation):
            small_world(initial_states={"nope"})

    def test_world_obs_label_total(self):
        with pytest.raises(InvariantViolation):
            small_world(obs_label={"s_a": "a", "s_b": "b"})

    def test_world_rejects_undeclared_edge_action(self):
        with pytest.raises(InvariantViolation):
            small_world(edges={Edge("s_a", "s_b", frozenset({"jump"}))})

    def test_world_rejects_undeclared_observation(self):
        with pytest.raises(InvariantViolation):
            small_world(obs_label={"s_a": "zz", "s_b": "b", "s_g": "g"})

    def test_plan_passive_states_must_be_empty(self):
        with pytest.raises(InvariantViolation):
            Plan(
                states={"init", "done"},
                initial_states={"init"},
                terminating_states={"done"},
                actions={"m"},
                observations={"g"},
                action_label={"init": {"m"}, "done": set()},
                edges={Edge("init", "done", frozenset({"g"}))},
            )

    def test_plan_acting_states_must_act(self):
        with pytest.raises(InvariantViolation):
            Plan(
                states={"init", "p", "done"},
                initial_states={"init"},
                terminating_states={"done"},
                actions={"m"},
                observations={"a", "g"},
                action_label={"init": set(), "p": set(), "done": set()},
                edges={
                    Edge("init", "p", frozenset({"a"})),
                    Edge("p", "done", frozenset({"g"})),
                },
            )

    def test_terminating_state_cannot_move(self):
        with pytest.raises(InvariantViolation):
            Plan(
                states={"init", "done"},
                initial_states={"init"},
                terminating_states={"done"},
                actions=set(),
                observations={"g"},
                action_label={"init": set(), "done": set()},
                edges={
                    Edge("init", "done", frozenset({"g"})),
                    Edge("done", "done", frozenset({"g"})),
                },
            )

    def test_duplicate_action_labels_allowed(self, zs_plan):
        # Distinct states may share identical action labels (plan memory).
        labels = [zs_plan.action_label[s] for s in zs_plan.states]
        assert len(labels) > len(set(labels))


class TestExecution:
    def test_from_string_round_trip(self):
        execution = Execution.from_string("a m b m g")
        assert execution.observations == ("a", "b", "g")
        assert execution.actions == ("m", "m")
        assert str(execution) == "a m b m g"

    def test_must_end_with_observation(self):
        with pytest.raises(InvariantViolation):
            Execution(("a", "b"), ("m", "m"))

    def test_prefix(self):
        execution = Execution.from_string("a m b m g")
        assert str(execution.prefix(1)) == "a m b"
        assert execution.prefix(0) == Execution(("a",))
        assert execution.prefix(1).is_prefix_of(execution)


class TestTraceWorld:
    def test_zero_action_execution_stays_at_start(self, chain3):
        result = trace_world(Execution.from_string("a"), chain3)
        assert result.reached == "s_a"
        assert result.path == ("s_a",)

    def test_deterministic_chain(self, chain3):
        result = trace_world(Execution.from_string("a m b m g"), chain3)
        assert result.reached == "s_g"
        assert result.path == ("s_a", "s_b", "s_g")

    def test_no_initial_match(self, chain3):
        with pytest.raises(NoInitialMatch):
            trace_world(Execution.from_string("x"), chain3)

    def test_dead_trace(self, chain3):
        with pytest.raises(DeadTrace):
            trace_world(Execution.from_string("a m g"), chain3)

    def test_grid7_straight_run_from_a(self, grid7):
        assert trace_world(Execution.from_string("a E g"), grid7).reached == "g"

    def test_grid7_zigzag_run(self, grid7):
        execution = Execution.from_string("c E d E e SW b SW a E g")
        result = trace_world(execution, grid7)
        assert result.reached == "g"
        assert result.path == ("c", "d", "e", "b", "a", "g")

    def test_ambiguous_outside_full_observability(self):
        world = World(
            states={"s1", "s2", "s3"},
            initial_states={"s1", "s2", "s3"},
            goal_states={"s3"},
            observations={"a", "x"},
            actions={"m"},
            edges={
                Edge("s1", "s2", frozenset({"m"})),
                Edge("s1", "s3", frozenset({"m"})),
            },
            obs_label={"s1": "a", "s2": "x", "s3": "x"},
        )
        with pytest.raises(AmbiguousTrace):
            trace_world(Execution.from_string("a m x"), world)

    def test_prefixes_of_traceable_executions(self, grid7, z_plan):
        language = joint_language(z_plan, grid7)
        for execution in sorted(language.maximal, key=str):
            full = trace_world(execution, grid7)
            for k in range(len(execution) + 1):
                partial = trace_world(execution.prefix(k), grid7)
                assert partial.path == full.path[: k + 1]


class TestTracePlan:
    def test_single_observation_termination(self, chain3_walk):
        result = trace_plan(Execution.from_string("g"), chain3_walk)
        assert result.reached == "done"
        assert result.path == ("done",)

    def test_walk_to_termination(self, chain3_walk):
        result = trace_plan(Execution.from_string("a m b m g"), chain3_walk)
        assert result.reached == "done"
        assert result.path == ("pa", "pb", "done")

    def test_action_not_offered(self, chain3_walk):
        with pytest.raises(ActionNotOffered):
            trace_plan(Execution.from_string("a x b"), chain3_walk)

    def test_backchained_run_terminates(self, grid7, backchained_plan):
        language = joint_language(backchained_plan, grid7)
        longest = max(language.maximal, key=len)
        result = trace_plan(longest, backchained_plan)
        assert result.reached in backchained_plan.terminating_states

    def test_branch_choice_disambiguated_by_action(self, zs_plan):
        # Both branches accept the first observation; the action picks one.
        result = trace_plan(Execution.from_string("c E d"), zs_plan)
        assert result.path[0] == "zc"
        result = trace_plan(Execution.from_string("c SE b"), zs_plan)
        assert result.path[0] == "sc"

    def test_unresolvable_branch_is_ambiguous(self, zs_plan):
        with pytest.raises(AmbiguousTrace):
            trace_plan(Execution.from_string("c"), zs_plan)


class TestScope:
    def test_in_scope(self, chain3):
        report = check_scope(chain3)
        assert report.ok
        assert report.single_goal and report.starts_anywhere and report.fully_observable

    def test_restricted_initial_states_fail(self):
        world = small_world(initial_states={"s_a"})
        report = check_scope(world)
        assert not report.ok and not report.starts_anywhere

    def test_shared_observation_fails(self):
        world = small_world(
            observations={"a", "x"},
            obs_label={"s_a": "a", "s_b": "x", "s_g": "x"},
        )
        report = check_scope(world)
        assert not report.ok and not report.fully_observable

    def test_multiple_goals_fail(self):
        report = check_scope(small_world(goal_states={"s_b", "s_g"}))
        assert not report.ok and not report.single_goal


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6))
def test_in_scope_worlds_trace_deterministically(seed):
    # The (action, observation) pair pins the successor when labels are injective.
    world = random_world(random.Random(seed))
    for state in world.states:
        for action in world.available_actions(state):
            successors = world.step(state, action)
            observed = [world.obs_label[t] for t in successors]
            assert len(observed) == len(set(observed))
