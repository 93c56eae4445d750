"""Greedy tree construction driven by cost per separated pair.

The builder works top-down.  At a node holding object set G it scores every
usable test (one that separates at least one pair of G) by its worst-case
price of progress

    max over outcomes i of   cost(t, i) / (pairs(G) - pairs(G_i)),

where ``G_i`` is the bucket of objects answering ``i`` — so the denominator is
the number of separable pairs that answering ``i`` would resolve — and commits
to the test minimizing that score.  Because each answer's cost may differ,
a test can look cheap on one branch and ruinous on another; taking the max
makes the score honest about the bad branch.

Outcomes that no object of G produces are, by default, still scored (they
contribute ``cost/pairs(G)``, i.e. full price for zero progress); pass
``include_empty_outcomes=False`` to score only outcomes that can actually
occur.  Both variants are deterministic: score ties break toward the smallest
test id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from dfep.model import (
    DecisionTree,
    Instance,
    Internal,
    Leaf,
    evaluate,
    pair_count,
    partition,
    separated_pairs,
)

__all__ = [
    "GreedyStep",
    "GreedyTrace",
    "criterion_value",
    "divide_pairs",
    "root_lower_bound",
    "select_test",
]


@dataclass(frozen=True)
class GreedyStep:
    """One committed split: where it happened, what was chosen, and why.

    ``pairs_after`` lists the separable pairs left inside each nonempty
    branch, in ascending outcome order; the difference between
    ``pairs_before`` and their sum is what the chosen test resolved.
    """

    objects: frozenset[int]
    test: int
    ratio: Fraction
    pairs_before: int
    pairs_after: tuple[int, ...]

    @property
    def pairs_separated(self) -> int:
        return self.pairs_before - sum(self.pairs_after)


@dataclass
class GreedyTrace:
    """Every split of one build, in pre-order (ascending outcomes)."""

    steps: list[GreedyStep] = field(default_factory=list)


def _checked_members(objects: Iterable[int], inst: Instance) -> frozenset[int]:
    members = frozenset(objects)
    if not members:
        raise ValueError("cannot work with an empty object set")
    bad = [s for s in members if not 0 <= s < inst.num_objects]
    if bad:
        raise ValueError(f"no such object(s): {sorted(bad)}")
    return members


def criterion_value(
    objects: Iterable[int],
    test: int,
    inst: Instance,
    *,
    include_empty_outcomes: bool = True,
) -> Fraction | None:
    """Score one test on one object set; None if the test separates nothing.

    Lower is better.  The score of a usable test is always finite: an outcome
    that keeps every pair together would make progress zero, but a usable
    test has no such outcome among those an object can produce, and empty
    outcomes are charged against all of ``pairs(G)``.
    """
    members = _checked_members(objects, inst)
    buckets = partition(members, test, inst)
    total = pair_count(members, inst)
    if total == 0 or separated_pairs(members, test, inst) == 0:
        return None
    if include_empty_outcomes:
        outcomes: Iterable[int] = range(1, inst.num_outcomes + 1)
    else:
        outcomes = sorted(buckets)
    score = Fraction(0)
    for i in outcomes:
        remaining = pair_count(buckets[i], inst) if i in buckets else 0
        score = max(score, Fraction(inst.cost(test, i), total - remaining))
    return score


def select_test(
    objects: Iterable[int],
    inst: Instance,
    *,
    include_empty_outcomes: bool = True,
) -> tuple[int, Fraction]:
    """The cheapest-progress test for a mixed object set, with its score."""
    members = _checked_members(objects, inst)
    if inst.is_homogeneous(members):
        raise ValueError("object set holds a single class; no test is needed")
    best: tuple[int, Fraction] | None = None
    for t in inst.tests:
        score = criterion_value(
            members, t, inst, include_empty_outcomes=include_empty_outcomes
        )
        if score is not None and (best is None or score < best[1]):
            best = (t, score)
    if best is None:
        raise ValueError(
            f"objects {sorted(members)} hold more than one class but no test "
            "separates them: incomplete instance"
        )
    return best


def divide_pairs(
    objects: Iterable[int],
    inst: Instance,
    *,
    include_empty_outcomes: bool = True,
    trace: GreedyTrace | None = None,
) -> DecisionTree:
    """Build a tree greedily over the given objects.

    Each chosen split separates at least one pair, so the recursion always
    terminates in a valid tree.  Pass a :class:`GreedyTrace` to receive the
    per-node decisions.
    """
    members = _checked_members(objects, inst)

    def build(group: frozenset[int]) -> DecisionTree:
        if inst.is_homogeneous(group):
            return Leaf(class_id=inst.classes[next(iter(group))], objects=group)
        test, score = select_test(
            group, inst, include_empty_outcomes=include_empty_outcomes
        )
        buckets = partition(group, test, inst)
        if trace is not None:
            trace.steps.append(
                GreedyStep(
                    objects=group,
                    test=test,
                    ratio=score,
                    pairs_before=pair_count(group, inst),
                    pairs_after=tuple(
                        pair_count(buckets[i], inst) for i in sorted(buckets)
                    ),
                )
            )
        return Internal(
            test=test,
            children={i: build(buckets[i]) for i in sorted(buckets)},
        )

    return build(members)


def root_lower_bound(
    objects: Iterable[int],
    inst: Instance,
    *,
    include_empty_outcomes: bool = True,
) -> Fraction:
    """A certified floor under the best possible worst-case cost.

    Looks at the greedy root test, finds which of its outcomes ends up the
    most expensive once the greedy finishes below it (ties toward the
    smallest outcome), and scales that outcome's cost by how little of the
    pair mass it resolves.  The resulting value never exceeds the worst-case
    cost of the best tree, so it certifies near-optimality whenever the
    greedy lands close to it.
    """
    members = _checked_members(objects, inst)
    if inst.is_homogeneous(members):
        return Fraction(0)
    test, _ = select_test(
        members, inst, include_empty_outcomes=include_empty_outcomes
    )
    buckets = partition(members, test, inst)
    total = pair_count(members, inst)
    worst_outcome: int | None = None
    worst_height: Fraction | None = None
    for i in sorted(buckets):
        subtree = divide_pairs(
            buckets[i], inst, include_empty_outcomes=include_empty_outcomes
        )
        height = inst.cost(test, i) + evaluate(subtree, inst).worst
        if worst_height is None or height > worst_height:
            worst_height = height
            worst_outcome = i
    assert worst_outcome is not None
    remaining = pair_count(buckets[worst_outcome], inst)
    return Fraction(inst.cost(test, worst_outcome) * total, total - remaining)
