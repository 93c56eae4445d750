"""Exact-solver tests: DP optima vs exhaustive enumeration, budgets, frontier."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from dfep.model import Instance, evaluate, validate_tree
from dfep.oracle import (
    FrontierPoint,
    enumerate_trees,
    harmonic,
    opt_expected,
    opt_expected_under_budget,
    opt_worst,
    pareto_frontier,
)
from tests.conftest import random_complete_instance


def small_instances(seed: int, count: int, **overrides):
    rng = random.Random(seed)
    for _ in range(count):
        params = dict(
            num_objects=rng.randint(2, 6),
            num_tests=rng.randint(3, 5),
            num_outcomes=rng.choice([2, 2, 3]),
            cost_mode=rng.choice(["unit", "fixed", "value"]),
        )
        params.update(overrides)
        yield random_complete_instance(rng, **params)


class TestHarmonic:
    def test_small_values(self):
        assert harmonic(0) == 0
        assert harmonic(1) == 1
        assert harmonic(2) == Fraction(3, 2)
        assert harmonic(3) == Fraction(11, 6)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            harmonic(-1)


class TestEnumeration:
    def test_single_class_set_is_one_leaf(self):
        inst = Instance.create([0, 0], [[1, 2]])
        trees = enumerate_trees([0, 1], inst)
        assert len(trees) == 1
        report = evaluate(trees[0], inst)
        assert report.worst == 0

    def test_all_enumerated_trees_are_valid(self):
        for inst in small_instances(101, 12):
            everything = frozenset(inst.objects)
            for tree in enumerate_trees(everything, inst):
                assert validate_tree(tree, everything, inst) == []

    def test_object_cap_enforced(self):
        rng = random.Random(3)
        inst = random_complete_instance(rng, num_objects=7, num_tests=6)
        with pytest.raises(ValueError, match="too large"):
            enumerate_trees(inst.objects, inst)


class TestOptima:
    def test_dp_matches_enumeration_minimum(self):
        for inst in small_instances(211, 20):
            everything = frozenset(inst.objects)
            reports = [evaluate(t, inst) for t in enumerate_trees(everything, inst)]
            assert opt_worst(everything, inst).value == min(r.worst for r in reports)
            assert opt_expected(everything, inst).value == min(r.expected for r in reports)

    def test_witness_trees_achieve_their_value(self):
        for inst in small_instances(223, 20, num_objects=7, num_tests=5):
            everything = frozenset(inst.objects)
            for solver, measure in ((opt_worst, "worst"), (opt_expected, "expected")):
                result = solver(everything, inst)
                assert validate_tree(result.tree, everything, inst) == []
                assert getattr(evaluate(result.tree, inst), measure) == result.value

    def test_explored_counts_are_sane(self):
        rng = random.Random(5)
        inst = random_complete_instance(rng, num_objects=6, num_tests=4)
        result = opt_worst(inst.objects, inst)
        assert 1 <= result.explored <= 2 ** inst.num_objects

    def test_optima_shrink_on_subsets(self):
        # Removing objects can only make identification easier, for both
        # cost measures.
        for inst in small_instances(227, 15, num_objects=7, num_tests=5):
            everything = frozenset(inst.objects)
            rng = random.Random(len(everything) * 31)
            subset = frozenset(s for s in everything if rng.random() < 0.6)
            if not subset:
                subset = frozenset({0})
            assert opt_worst(subset, inst).value <= opt_worst(everything, inst).value
            assert (
                opt_expected(subset, inst).value <= opt_expected(everything, inst).value
            )

    def test_size_cap_enforced(self):
        rng = random.Random(7)
        inst = random_complete_instance(rng, num_objects=15, num_tests=10)
        with pytest.raises(ValueError, match="too large"):
            opt_worst(inst.objects, inst)

    def test_inseparable_mixed_set_is_rejected(self):
        # Bypass create/validate to reach the solver with a broken instance.
        inst = Instance(
            classes=(0, 1),
            num_outcomes=2,
            outcome_table=((1, 1),),
            priors=(Fraction(1, 2), Fraction(1, 2)),
            cost_table=((Fraction(1), Fraction(1)),),
        )
        with pytest.raises(ValueError, match="incomplete"):
            opt_worst([0, 1], inst)


class TestBudgetedExpected:
    def test_none_budget_is_unconstrained(self):
        for inst in small_instances(307, 8):
            everything = frozenset(inst.objects)
            free = opt_expected_under_budget(everything, inst, None)
            assert free is not None
            assert free.value == opt_expected(everything, inst).value

    def test_infeasible_budget_returns_none(self):
        for inst in small_instances(311, 10):
            everything = frozenset(inst.objects)
            floor = opt_worst(everything, inst).value
            if floor == 0:
                continue
            assert opt_expected_under_budget(everything, inst, floor - Fraction(1, 7)) is None

    def test_budget_at_the_floor_is_feasible(self):
        for inst in small_instances(313, 10):
            everything = frozenset(inst.objects)
            floor = opt_worst(everything, inst).value
            result = opt_expected_under_budget(everything, inst, floor)
            assert result is not None
            report = evaluate(result.tree, inst)
            assert report.worst <= floor
            assert report.expected == result.value

    def test_expected_is_monotone_in_the_budget(self):
        for inst in small_instances(317, 10):
            everything = frozenset(inst.objects)
            floor = opt_worst(everything, inst).value
            previous = None
            for bump in (0, 1, 2, 4):
                result = opt_expected_under_budget(everything, inst, floor + bump)
                assert result is not None
                if previous is not None:
                    assert result.value <= previous
                previous = result.value

    def test_matches_enumeration_under_budget(self):
        for inst in small_instances(331, 12):
            everything = frozenset(inst.objects)
            reports = [evaluate(t, inst) for t in enumerate_trees(everything, inst)]
            for bump in (0, 1, 3):
                budget = opt_worst(everything, inst).value + bump
                feasible = [r.expected for r in reports if r.worst <= budget]
                result = opt_expected_under_budget(everything, inst, budget)
                assert result is not None
                assert result.value == min(feasible)


class TestParetoFrontier:
    @staticmethod
    def staircase_by_enumeration(inst: Instance) -> list[tuple[Fraction, Fraction]]:
        everything = frozenset(inst.objects)
        reports = [evaluate(t, inst) for t in enumerate_trees(everything, inst)]
        points: list[tuple[Fraction, Fraction]] = []
        for budget in sorted({r.worst for r in reports}):
            best = min(r.expected for r in reports if r.worst <= budget)
            if not points or best < points[-1][1]:
                points.append((budget, best))
        return points

    def test_matches_enumeration_staircase(self):
        for inst in small_instances(401, 15):
            frontier = pareto_frontier(inst.objects, inst)
            assert [(p.budget, p.expected) for p in frontier] == (
                self.staircase_by_enumeration(inst)
            )

    def test_endpoints_and_shape(self):
        for inst in small_instances(409, 12, num_objects=7, num_tests=5):
            everything = frozenset(inst.objects)
            frontier = pareto_frontier(everything, inst)
            assert frontier[0].budget == opt_worst(everything, inst).value
            assert frontier[-1].expected == opt_expected(everything, inst).value
            budgets = [p.budget for p in frontier]
            expectations = [p.expected for p in frontier]
            assert budgets == sorted(budgets)
            assert all(a < b for a, b in zip(budgets, budgets[1:]))
            assert all(a > b for a, b in zip(expectations, expectations[1:]))

    def test_witnesses_respect_their_point(self):
        for inst in small_instances(419, 10, num_objects=7, num_tests=5):
            everything = frozenset(inst.objects)
            for point in pareto_frontier(everything, inst):
                assert validate_tree(point.tree, everything, inst) == []
                report = evaluate(point.tree, inst)
                assert report.worst <= point.budget
                assert report.expected == point.expected

    def test_single_class_instance_has_trivial_frontier(self):
        inst = Instance.create([0, 0, 0], [[1, 2, 1], [1, 1, 2]])
        frontier = pareto_frontier(inst.objects, inst)
        assert frontier == [
            FrontierPoint(budget=Fraction(0), expected=Fraction(0), tree=frontier[0].tree)
        ]
        assert evaluate(frontier[0].tree, inst).worst == 0
