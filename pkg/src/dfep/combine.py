"""Blending two decision trees into one with both costs under control.

Given one tree built for low expected cost and one built for low worst-case
cost, :func:`combine_trees` produces a tree that follows the first until the
accumulated path cost crosses a threshold, then falls back to (a restriction
of) the second.  With threshold ``trade_off * worst_reference`` this caps the
expected cost at ``(1 + 1/trade_off)`` times the first tree's — always — and,
whenever every test's price is the same for all of its answers, caps the
worst-case cost at ``(1 + trade_off)`` times the second tree's.  When prices
do depend on the answer, no tree at all may satisfy both caps at once (the
test suite carries a two-object proof), so only the expected-cost cap is
promised there.

:func:`combine_uniform` sharpens the trade-off for unit-cost instances by
sweeping a window of thresholds and keeping the candidate with the lowest
expected cost.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from dfep.model import (
    DecisionTree,
    Instance,
    Internal,
    Leaf,
    RationalLike,
    as_fraction,
    evaluate,
    restrict_tree,
    tree_objects,
)

__all__ = [
    "CombineParams",
    "UniformCombineParams",
    "combine_trees",
    "combine_uniform",
    "find_replaceable",
    "subtree_at",
]


@dataclass(frozen=True)
class CombineParams:
    """Resolved arithmetic of one splice: trade-off, reference, threshold.

    ``worst_reference`` is recomputed from the fallback tree rather than
    trusted from the caller, and ``threshold`` is exactly their product.
    """

    trade_off: Fraction
    worst_reference: Fraction
    threshold: Fraction

    @classmethod
    def resolve(
        cls,
        worst_case_tree: DecisionTree,
        trade_off: RationalLike,
        inst: Instance,
    ) -> "CombineParams":
        ratio = as_fraction(trade_off)
        if ratio <= 0:
            raise ValueError(f"trade-off must be positive, got {ratio}")
        reference = evaluate(worst_case_tree, inst).worst
        return cls(
            trade_off=ratio,
            worst_reference=reference,
            threshold=ratio * reference,
        )


@dataclass(frozen=True)
class UniformCombineParams:
    """Threshold window for the unit-cost sweep.

    The trade-off is ``rho_numerator / worst_reference``; candidate
    thresholds use the numerators ``window_low .. window_high`` (inclusive),
    with ``window_high == rho_numerator``.
    """

    rho_numerator: int
    worst_reference: int
    window_low: int
    window_high: int

    @classmethod
    def resolve(cls, worst_reference: int, rho_numerator: int) -> "UniformCombineParams":
        if worst_reference < 1:
            raise ValueError(
                f"reference worst-case cost must be a positive integer, "
                f"got {worst_reference}"
            )
        if rho_numerator < 1:
            raise ValueError(
                f"trade-off numerator must be a positive integer, got {rho_numerator}"
            )
        high = rho_numerator
        low = -(-(rho_numerator * rho_numerator) // (2 * rho_numerator + 2 * worst_reference))
        if low > high:
            raise ValueError(
                "trade-off too small for this reference tree: empty threshold window"
            )
        return cls(
            rho_numerator=rho_numerator,
            worst_reference=worst_reference,
            window_low=low,
            window_high=high,
        )

    def window(self) -> Iterator[int]:
        return iter(range(self.window_low, self.window_high + 1))


def subtree_at(tree: DecisionTree, path: Sequence[int]) -> DecisionTree:
    """Follow a sequence of outcomes from the root; () names the root itself."""
    node = tree
    for depth, outcome in enumerate(path):
        if isinstance(node, Leaf):
            raise ValueError(f"path {tuple(path)} descends past a leaf at depth {depth}")
        if outcome not in node.children:
            raise ValueError(
                f"path {tuple(path)}: no branch for outcome {outcome} at depth {depth}"
            )
        node = node.children[outcome]
    return node


def _cheapest_branch(node: Internal, inst: Instance) -> Fraction:
    return min(inst.cost(node.test, outcome) for outcome in node.children)


def _crosses(node: DecisionTree, path_cost: Fraction, threshold: Fraction, inst: Instance) -> bool:
    """Should the walk stop at this node and hand over to the fallback tree?

    Stop when the path cost has reached the threshold, or when it has not
    but even the cheapest onward branch would strictly overshoot it — the
    last moment a hand-over can happen at-or-under the threshold.
    """
    if path_cost >= threshold:
        return True
    return isinstance(node, Internal) and (
        path_cost + _cheapest_branch(node, inst) > threshold
    )


def find_replaceable(
    tree: DecisionTree, inst: Instance, threshold: RationalLike
) -> list[tuple[int, ...]]:
    """The hand-over frontier: outcome paths where the threshold is crossed.

    A node's path cost is the sum of branch costs on the edges from the root
    through the edge entering it (its own test is not yet paid; the root's
    path cost is 0).  Returned paths are in pre-order, ascending by outcome,
    and form an antichain: no returned node lies below another, and every
    leaf whose path cost reaches the threshold has exactly one returned
    ancestor-or-self.
    """
    cap = as_fraction(threshold)
    frontier: list[tuple[int, ...]] = []

    def walk(node: DecisionTree, path_cost: Fraction, path: tuple[int, ...]) -> None:
        if _crosses(node, path_cost, cap, inst):
            frontier.append(path)
            return
        if isinstance(node, Leaf):
            return
        for outcome in sorted(node.children):
            walk(
                node.children[outcome],
                path_cost + inst.cost(node.test, outcome),
                path + (outcome,),
            )

    walk(tree, Fraction(0), ())
    return frontier


def combine_trees(
    expected_tree: DecisionTree,
    worst_case_tree: DecisionTree,
    trade_off: RationalLike,
    inst: Instance,
) -> DecisionTree:
    """Splice the fallback tree into the expected tree past the threshold.

    The result follows ``expected_tree`` while the accumulated path cost
    stays under ``trade_off`` times the fallback's worst-case cost, then
    continues as the fallback restricted to the objects still alive.  If the
    expected tree never reaches the threshold the result is ``expected_tree``
    itself, unchanged.

    Every object's path gets at most the fallback's worst-case cost added on
    top of (a prefix of) its original path, which yields the expected-cost
    cap ``(1 + 1/trade_off)``; with answer-independent test prices the splice
    points sit at-or-under the threshold, which also yields the worst-case
    cap ``(1 + trade_off)``.
    """
    params = CombineParams.resolve(worst_case_tree, trade_off, inst)
    scope = tree_objects(expected_tree)
    if scope != tree_objects(worst_case_tree):
        raise ValueError("the two trees cover different object sets")

    def rebuild(node: DecisionTree, path_cost: Fraction) -> DecisionTree:
        if _crosses(node, path_cost, params.threshold, inst):
            return restrict_tree(worst_case_tree, tree_objects(node), inst)
        if isinstance(node, Leaf):
            return node
        return Internal(
            test=node.test,
            children={
                outcome: rebuild(
                    node.children[outcome],
                    path_cost + inst.cost(node.test, outcome),
                )
                for outcome in sorted(node.children)
            },
        )

    return rebuild(expected_tree, Fraction(0))


def combine_uniform(
    expected_tree: DecisionTree,
    worst_case_tree: DecisionTree,
    rho_numerator: int,
    inst: Instance,
) -> DecisionTree:
    """Best-of-window splice for unit-cost instances.

    With every test costing exactly 1, thresholds only matter at integer
    values, so instead of one splice this sweeps the numerators in the
    resolved window, builds one candidate per threshold, and returns the
    candidate with the smallest expected cost (ties: smallest numerator).
    The returned tree's worst-case cost is at most ``rho_numerator`` more
    than the fallback's, and the window's lower end is chosen so that the
    expected-cost factor improves on the single-splice cap — for a trade-off
    of 2 it drops from 3/2 to 5/4.
    """
    for t in inst.tests:
        for cost in inst.cost_table[t]:
            if cost != 1:
                raise ValueError("the uniform variant requires unit costs")
    reference = evaluate(worst_case_tree, inst).worst
    if reference < 1 or reference.denominator != 1:
        raise ValueError(
            f"fallback tree needs a positive integer worst-case cost, got {reference}"
        )
    params = UniformCombineParams.resolve(int(reference), operator.index(rho_numerator))
    best: tuple[Fraction, DecisionTree] | None = None
    for numerator in params.window():
        candidate = combine_trees(
            expected_tree,
            worst_case_tree,
            Fraction(numerator, params.worst_reference),
            inst,
        )
        expected = evaluate(candidate, inst).expected
        if best is None or expected < best[0]:
            best = (expected, candidate)
    assert best is not None
    return best[1]
