from __future__ import annotations

import dataclasses
import random

import pytest

from actionsensors import (
    AlphabetMismatch,
    Edge,
    NotFinite,
    Plan,
    ScopeViolation,
    World,
    is_finite_on,
    is_receptive,
    is_safe,
    joint_language,
    oracle_check,
    product_graph,
    solves,
    trace_plan,
    trace_world,
)
from actionsensors import validate as validate_mod
from generators import mutate_plan, random_solving_plan, random_world


def drop_edge(plan: Plan, source: str, target: str) -> Plan:
    return dataclasses.replace(
        plan,
        edges=frozenset(
            e for e in plan.edges if not (e.source == source and e.target == target)
        ),
    )


@pytest.fixture
def loop_world() -> World:
    # chain3 plus a back-edge making action m nondeterministic at s_b.
    return World(
        states={"s_a", "s_b", "s_g"},
        initial_states={"s_a", "s_b", "s_g"},
        goal_states={"s_g"},
        observations={"a", "b", "g"},
        actions={"m"},
        edges={
            Edge("s_a", "s_b", frozenset({"m"})),
            Edge("s_b", "s_g", frozenset({"m"})),
            Edge("s_b", "s_a", frozenset({"m"})),
        },
        obs_label={"s_a": "a", "s_b": "b", "s_g": "g"},
    )


class TestProductGraph:
    def test_chain_product_shape(self, chain3, chain3_walk):
        product = product_graph(chain3_walk, chain3)
        assert product.pairs == {("pa", "s_a"), ("pb", "s_b"), ("done", "s_g")}
        assert product.initial_pairs == product.pairs  # every state is a start
        assert len(product.transitions) == 2

    def test_alphabet_mismatch(self, chain3, chain3_walk):
        oversized = dataclasses.replace(chain3_walk, actions=frozenset({"m", "warp"}))
        with pytest.raises(AlphabetMismatch):
            product_graph(oversized, chain3)

    def test_branching_product_splits_after_first_observation(self, grid7, zs_plan):
        product = product_graph(zs_plan, grid7)
        # From the initial observation at c both branch states are live.
        assert ("zc", "c") in product.pairs and ("sc", "c") in product.pairs

    def test_missing_edge_shows_up_as_unreceptive_pair(self, chain3, chain3_walk):
        broken = drop_edge(chain3_walk, "pa", "pb")
        product = product_graph(broken, chain3)
        # The pair is still reachable; receptivity flags it.
        assert ("pa", "s_a") in product.pairs
        ok, witness = is_receptive(broken, chain3)
        assert not ok
        assert str(witness) == "a m b"

    def test_witnesses_are_shortest(self, grid7, z_plan):
        product = product_graph(z_plan, grid7)
        for pair, witness in product.witnesses.items():
            assert trace_world(witness, grid7).reached == pair[1]
            assert trace_plan(witness, z_plan).reached == pair[0]


class TestSafety:
    def test_fixtures_are_safe(self, grid7, z_plan, s_plan, zs_plan, backchained_plan):
        for plan in (z_plan, s_plan, zs_plan, backchained_plan):
            ok, witness = is_safe(plan, grid7)
            assert ok and witness is None

    def test_commanding_unavailable_action_is_unsafe(self):
        world = World(
            states={"s_a", "s_g"},
            initial_states={"s_a", "s_g"},
            goal_states={"s_g"},
            observations={"a", "g"},
            actions={"m", "n"},
            edges={Edge("s_a", "s_g", frozenset({"m"}))},
            obs_label={"s_a": "a", "s_g": "g"},
        )
        plan = Plan(
            states={"init", "pa", "done"},
            initial_states={"init"},
            terminating_states={"done"},
            actions={"m", "n"},
            observations={"a", "g"},
            action_label={"init": set(), "pa": {"n"}, "done": set()},
            edges={
                Edge("init", "pa", frozenset({"a"})),
                Edge("init", "done", frozenset({"g"})),
                Edge("pa", "done", frozenset({"g"})),
            },
        )
        ok, witness = is_safe(plan, world)
        assert not ok
        assert str(witness) == "a"


class TestReceptivity:
    def test_fixtures_are_receptive(self, grid7, zs_plan):
        ok, witness = is_receptive(zs_plan, grid7)
        assert ok and witness is None

    def test_missing_initial_edge(self, chain3, chain3_walk):
        broken = drop_edge(chain3_walk, "init", "pb")
        ok, witness = is_receptive(broken, chain3)
        assert not ok
        assert str(witness) == "b"


class TestFiniteness:
    def test_acyclic_product_is_finite(self, chain3, chain3_walk):
        ok, cycle = is_finite_on(chain3_walk, chain3)
        assert ok and cycle is None

    def test_dithering_plan_is_not_finite(self, loop_world):
        plan = Plan(
            states={"init", "pa", "pb", "done"},
            initial_states={"init"},
            terminating_states={"done"},
            actions={"m"},
            observations={"a", "b", "g"},
            action_label={"init": set(), "pa": {"m"}, "pb": {"m"}, "done": set()},
            edges={
                Edge("init", "pa", frozenset({"a"})),
                Edge("init", "pb", frozenset({"b"})),
                Edge("init", "done", frozenset({"g"})),
                Edge("pa", "pb", frozenset({"b"})),
                Edge("pb", "pa", frozenset({"a"})),
                Edge("pb", "done", frozenset({"g"})),
            },
        )
        ok, cycle = is_finite_on(plan, loop_world)
        assert not ok
        assert ("pa", "s_a") in cycle or ("pb", "s_b") in cycle

    def test_combined_plan_is_finite_despite_crossovers(self, grid7, zs_plan):
        # Measure-level cycles, not execution cycles.
        ok, cycle = is_finite_on(zs_plan, grid7)
        assert ok and cycle is None


class TestSolves:
    def test_fixture_solutions(self, grid7, z_plan, s_plan, zs_plan, backchained_plan):
        for plan in (backchained_plan, z_plan, s_plan, zs_plan):
            report = solves(plan, grid7)
            assert report.verdict, report.summary()
            assert report.counterexample is None

    def test_terminating_off_goal_fails(self, chain3, chain3_walk):
        # Send the b observation straight to termination: done sits on s_b.
        edges = {
            e for e in chain3_walk.edges if not (e.source == "init" and e.target == "pb")
        }
        edges.add(Edge("init", "done", frozenset({"b"})))
        broken = dataclasses.replace(chain3_walk, edges=frozenset(edges))
        report = solves(broken, chain3)
        assert not report.verdict and not report.reaches_goal
        assert report.counterexample is not None

    def test_scope_violation(self, chain3, chain3_walk):
        narrow = dataclasses.replace(chain3, initial_states=frozenset({"s_a"}))
        with pytest.raises(ScopeViolation):
            solves(chain3_walk, narrow)


class TestJointLanguage:
    def test_chain_language_exact(self, chain3, chain3_walk):
        language = joint_language(chain3_walk, chain3)
        assert {str(e) for e in language.maximal} == {"a m b m g", "b m g", "g"}
        assert {str(e) for e in language.executions} == {
            "a",
            "a m b",
            "a m b m g",
            "b",
            "b m g",
            "g",
        }

    def test_unreachable_branch_absent(self, chain3, chain3_walk):
        # A second b-handler that nothing routes to leaves the language unchanged.
        extended = Plan(
            states=chain3_walk.states | {"ghost"},
            initial_states=chain3_walk.initial_states,
            terminating_states=chain3_walk.terminating_states,
            actions=chain3_walk.actions,
            observations=chain3_walk.observations,
            action_label={**chain3_walk.action_label, "ghost": frozenset({"m"})},
            edges=chain3_walk.edges | {Edge("ghost", "done", frozenset({"g"}))},
        )
        assert joint_language(extended, chain3) == joint_language(chain3_walk, chain3)

    def test_prefix_closure(self, grid7, zs_plan):
        language = joint_language(zs_plan, grid7)
        for execution in language.executions:
            for k in range(len(execution)):
                assert execution.prefix(k) in language.executions
        for execution in language.executions:
            assert any(
                execution.is_prefix_of(maximal) for maximal in language.maximal
            )

    def test_deterministic_plan_has_one_maximal_per_start(self, grid7, backchained_plan):
        language = joint_language(backchained_plan, grid7)
        starts = sorted(e.observations[0] for e in language.maximal)
        assert starts == sorted(grid7.obs_label[s] for s in grid7.states)

    def test_maximal_executions_end_at_goal_and_termination(self, grid7, z_plan):
        language = joint_language(z_plan, grid7)
        for execution in language.maximal:
            assert trace_world(execution, grid7).reached in grid7.goal_states
            assert trace_plan(execution, z_plan).reached in z_plan.terminating_states

    def test_not_finite_raises(self, loop_world, chain3_walk):
        plan = Plan(
            states={"init", "pa", "pb", "done"},
            initial_states={"init"},
            terminating_states={"done"},
            actions={"m"},
            observations={"a", "b", "g"},
            action_label={"init": set(), "pa": {"m"}, "pb": {"m"}, "done": set()},
            edges={
                Edge("init", "pa", frozenset({"a"})),
                Edge("init", "pb", frozenset({"b"})),
                Edge("init", "done", frozenset({"g"})),
                Edge("pa", "pb", frozenset({"b"})),
                Edge("pb", "pa", frozenset({"a"})),
                Edge("pb", "done", frozenset({"g"})),
            },
        )
        with pytest.raises(NotFinite):
            joint_language(plan, loop_world)


class TestOracle:
    def test_fixtures_agree(
        self, grid7, chain3, z_plan, s_plan, zs_plan, backchained_plan, chain3_walk
    ):
        for plan, world in [
            (z_plan, grid7),
            (s_plan, grid7),
            (zs_plan, grid7),
            (backchained_plan, grid7),
            (chain3_walk, chain3),
        ]:
            report = oracle_check(plan, world)
            assert report.agree and report.verdict

    def test_default_bound(self, chain3, chain3_walk):
        report = oracle_check(chain3_walk, chain3)
        assert report.bound == len(chain3_walk.states) * len(chain3.states) + 1

    def test_corrupted_library_is_detected(self, chain3, chain3_walk, monkeypatch):
        real = validate_mod.solves

        def corrupted(plan, world):
            report = real(plan, world)
            return dataclasses.replace(report, safe=not report.safe)

        monkeypatch.setattr(validate_mod, "solves", corrupted)
        report = oracle_check(chain3_walk, chain3)
        assert not report.agree

    def test_random_instances_agree(self):
        rng = random.Random(20250809)
        for _ in range(60):
            world = random_world(rng, max_states=5)
            plan = random_solving_plan(world, rng)
            if rng.random() < 0.5:
                plan = mutate_plan(plan, world, rng)
            report = oracle_check(plan, world)
            assert report.agree, (world, plan)
