"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's own formulas: pair counts
are found by enumerating object pairs one by one, and reference costs by
re-walking trees with a hand-rolled recursion.  Agreement between these and
the library is then evidence, not tautology.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from dfep.model import DecisionTree, Instance, Internal, Leaf


def brute_force_pair_count(objects, inst: Instance) -> int:
    """Count separable pairs by checking every unordered pair directly."""
    members = sorted(objects)
    total = 0
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if inst.classes[a] != inst.classes[b]:
                total += 1
    return total


def brute_force_separated(objects, test: int, inst: Instance) -> int:
    """Count separable pairs assigned different outcomes, pair by pair."""
    members = sorted(objects)
    row = inst.outcome_table[test]
    total = 0
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if inst.classes[a] != inst.classes[b] and row[a] != row[b]:
                total += 1
    return total


def path_costs_by_walking(tree: DecisionTree, inst: Instance) -> dict[int, Fraction]:
    """Per-object path cost computed by following each object from the root."""
    out: dict[int, Fraction] = {}

    def follow(obj: int) -> Fraction:
        node = tree
        cost = Fraction(0)
        while isinstance(node, Internal):
            outcome = inst.outcome_table[node.test][obj]
            cost += inst.cost_table[node.test][outcome - 1]
            node = node.children[outcome]
        assert obj in node.objects
        return cost

    def collect(node: DecisionTree) -> None:
        if isinstance(node, Leaf):
            for obj in node.objects:
                out[obj] = follow(obj)
        else:
            for child in node.children.values():
                collect(child)

    collect(tree)
    return out


def random_instance(
    rng: random.Random,
    *,
    num_objects: int,
    num_tests: int,
    num_outcomes: int = 2,
    num_classes: int | None = None,
    cost_mode: str = "unit",
    max_cost: int = 8,
) -> Instance | None:
    """Draw a random complete instance, or None if the draw is incomplete.

    Callers should loop until a draw succeeds; with enough tests most draws
    do.  ``cost_mode`` is one of ``unit``, ``fixed`` (one random cost per
    test), or ``value`` (a random cost per test and outcome).
    """
    if num_classes is None:
        num_classes = rng.randint(2, max(2, num_objects))
    num_classes = min(num_classes, num_objects)
    classes = list(range(num_classes)) + [
        rng.randrange(num_classes) for _ in range(num_objects - num_classes)
    ]
    rng.shuffle(classes)
    outcomes = [
        [rng.randint(1, num_outcomes) for _ in range(num_objects)] for _ in range(num_tests)
    ]
    if cost_mode == "unit":
        costs = None
    elif cost_mode == "fixed":
        costs = [rng.randint(1, max_cost) for _ in range(num_tests)]
    elif cost_mode == "value":
        costs = [
            [rng.randint(1, max_cost) for _ in range(num_outcomes)] for _ in range(num_tests)
        ]
    else:
        raise ValueError(f"unknown cost_mode {cost_mode!r}")
    weights = [rng.randint(1, 10) for _ in range(num_objects)]
    total = sum(weights)
    priors = [Fraction(w, total) for w in weights]
    inst = Instance.create(
        classes,
        outcomes,
        priors=priors,
        costs=costs,
        num_outcomes=num_outcomes,
    )
    for a in range(num_objects):
        for b in range(a + 1, num_objects):
            if classes[a] != classes[b] and all(
                row[a] == row[b] for row in outcomes
            ):
                return None
    return inst


def random_complete_instance(rng: random.Random, **kwargs) -> Instance:
    """Like random_instance, but retries until the draw is complete."""
    for _ in range(500):
        inst = random_instance(rng, **kwargs)
        if inst is not None:
            return inst
    raise RuntimeError("could not draw a complete instance; loosen the parameters")


@pytest.fixture
def two_test_example() -> Instance:
    """Three objects, two classes, two hand-picked binary tests.

    Test 0 splits {0} from {1, 2}; test 1 splits {0, 1} from {2}.  Classes
    are 0, 0, 1 so only pairs (0,2) and (1,2) are separable.
    """
    return Instance.create(
        classes=[0, 0, 1],
        outcomes=[[1, 2, 2], [1, 1, 2]],
        priors=["1/2", "1/4", "1/4"],
    )
