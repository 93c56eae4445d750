"""Exact baselines: optimal trees by exhaustive dynamic programming.

These solvers exist to judge the fast algorithms, not to be fast themselves.
They memoize over subsets of objects (bitmasks), so they are exponential and
deliberately refuse sets larger than a small cap.  Everything returns exact
rationals and a witness tree alongside the optimal value.

Provided here:

* :func:`opt_worst` / :func:`opt_expected` — minimum worst-case / expected
  cost over all valid trees.
* :func:`opt_expected_under_budget` — minimum expected cost among trees whose
  worst-case cost stays within a budget (None when the budget is infeasible).
* :func:`pareto_frontier` — the full worst-vs-expected trade-off staircase.
* :func:`enumerate_trees` — every canonical tree over a tiny object set.
* :func:`harmonic` — exact harmonic numbers, used by guarantee checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from dfep.model import DecisionTree, Instance, Internal, Leaf, partition

__all__ = [
    "DP_OBJECT_LIMIT",
    "ENUMERATION_OBJECT_LIMIT",
    "FrontierPoint",
    "OracleResult",
    "enumerate_trees",
    "harmonic",
    "opt_expected",
    "opt_expected_under_budget",
    "opt_worst",
    "pareto_frontier",
]

DP_OBJECT_LIMIT = 14
ENUMERATION_OBJECT_LIMIT = 6


@dataclass(frozen=True)
class OracleResult:
    """An exact optimum: its value, one optimal tree, and the search size.

    ``explored`` counts distinct object subsets the solver memoized, which
    makes regressions in pruning visible in tests.
    """

    value: Fraction
    tree: DecisionTree
    explored: int


@dataclass(frozen=True)
class FrontierPoint:
    """One step of the trade-off staircase.

    ``budget`` is an achievable worst-case cost, ``expected`` the best
    expected cost attainable without exceeding it, and ``tree`` a witness
    achieving both.
    """

    budget: Fraction
    expected: Fraction
    tree: DecisionTree


def harmonic(k: int) -> Fraction:
    """The k-th harmonic number 1 + 1/2 + ... + 1/k, exactly (0 for k=0)."""
    if k < 0:
        raise ValueError(f"harmonic numbers need k >= 0, got {k}")
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def _prepare(objects: Iterable[int], inst: Instance, limit: int) -> frozenset[int]:
    members = frozenset(objects)
    bad = [s for s in members if not 0 <= s < inst.num_objects]
    if bad:
        raise ValueError(f"no such object(s): {sorted(bad)}")
    if not members:
        raise ValueError("oracle needs a nonempty object set")
    if len(members) > limit:
        raise ValueError(
            f"instance too large for exact oracle: {len(members)} objects "
            f"(limit {limit})"
        )
    return members


def _mask_of(members: frozenset[int]) -> int:
    mask = 0
    for s in members:
        mask |= 1 << s
    return mask


def _members_of(mask: int) -> frozenset[int]:
    out = []
    s = 0
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return frozenset(out)


def _leaf_for(members: frozenset[int], inst: Instance) -> Leaf:
    return Leaf(class_id=inst.classes[next(iter(members))], objects=members)


def _usable_splits(
    members: frozenset[int], inst: Instance
) -> list[tuple[int, dict[int, frozenset[int]]]]:
    """Tests that split the set into at least two nonempty buckets."""
    out = []
    for t in inst.tests:
        buckets = partition(members, t, inst)
        if len(buckets) >= 2:
            out.append((t, buckets))
    return out


def _raise_incomplete(members: frozenset[int]) -> None:
    raise ValueError(
        f"objects {sorted(members)} hold more than one class but no test "
        "separates them: incomplete instance"
    )


def _worst_dp(
    members: frozenset[int],
    inst: Instance,
    memo: dict[int, tuple[Fraction, DecisionTree]],
) -> tuple[Fraction, DecisionTree]:
    mask = _mask_of(members)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    if inst.is_homogeneous(members):
        result = (Fraction(0), _leaf_for(members, inst))
    else:
        best: tuple[Fraction, DecisionTree] | None = None
        for t, buckets in _usable_splits(members, inst):
            height = Fraction(0)
            children: dict[int, DecisionTree] = {}
            for outcome in sorted(buckets):
                sub_value, sub_tree = _worst_dp(buckets[outcome], inst, memo)
                height = max(height, inst.cost(t, outcome) + sub_value)
                children[outcome] = sub_tree
            if best is None or height < best[0]:
                best = (height, Internal(test=t, children=children))
        if best is None:
            _raise_incomplete(members)
        result = best
    memo[mask] = result
    return result


def _expected_dp(
    members: frozenset[int],
    inst: Instance,
    memo: dict[int, tuple[Fraction, DecisionTree]],
) -> tuple[Fraction, DecisionTree]:
    mask = _mask_of(members)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    if inst.is_homogeneous(members):
        result = (Fraction(0), _leaf_for(members, inst))
    else:
        best: tuple[Fraction, DecisionTree] | None = None
        for t, buckets in _usable_splits(members, inst):
            total = Fraction(0)
            children: dict[int, DecisionTree] = {}
            for outcome in sorted(buckets):
                bucket = buckets[outcome]
                sub_value, sub_tree = _expected_dp(bucket, inst, memo)
                total += inst.mass(bucket) * inst.cost(t, outcome) + sub_value
                children[outcome] = sub_tree
            if best is None or total < best[0]:
                best = (total, Internal(test=t, children=children))
        if best is None:
            _raise_incomplete(members)
        result = best
    memo[mask] = result
    return result


def opt_worst(objects: Iterable[int], inst: Instance) -> OracleResult:
    """Minimum worst-case cost of any valid tree over the given objects."""
    members = _prepare(objects, inst, DP_OBJECT_LIMIT)
    memo: dict[int, tuple[Fraction, DecisionTree]] = {}
    value, tree = _worst_dp(members, inst, memo)
    return OracleResult(value=value, tree=tree, explored=len(memo))


def opt_expected(objects: Iterable[int], inst: Instance) -> OracleResult:
    """Minimum prior-weighted expected cost of any valid tree."""
    members = _prepare(objects, inst, DP_OBJECT_LIMIT)
    memo: dict[int, tuple[Fraction, DecisionTree]] = {}
    value, tree = _expected_dp(members, inst, memo)
    return OracleResult(value=value, tree=tree, explored=len(memo))


def _budget_dp(
    members: frozenset[int],
    budget: Fraction,
    inst: Instance,
    memo: dict[tuple[int, Fraction], tuple[Fraction, DecisionTree] | None],
    worst_memo: dict[int, tuple[Fraction, DecisionTree]],
) -> tuple[Fraction, DecisionTree] | None:
    key = (_mask_of(members), budget)
    if key in memo:
        return memo[key]
    floor, _ = _worst_dp(members, inst, worst_memo)
    if budget < floor:
        memo[key] = None
        return None
    if inst.is_homogeneous(members):
        result: tuple[Fraction, DecisionTree] | None = (
            Fraction(0),
            _leaf_for(members, inst),
        )
    else:
        best: tuple[Fraction, DecisionTree] | None = None
        for t, buckets in _usable_splits(members, inst):
            total = Fraction(0)
            children: dict[int, DecisionTree] = {}
            for outcome in sorted(buckets):
                bucket = buckets[outcome]
                sub = _budget_dp(
                    bucket, budget - inst.cost(t, outcome), inst, memo, worst_memo
                )
                if sub is None:
                    break
                sub_value, sub_tree = sub
                total += inst.mass(bucket) * inst.cost(t, outcome) + sub_value
                children[outcome] = sub_tree
            else:
                if best is None or total < best[0]:
                    best = (total, Internal(test=t, children=children))
        result = best
    memo[key] = result
    return result


def opt_expected_under_budget(
    objects: Iterable[int],
    inst: Instance,
    budget: Fraction | int | None,
) -> OracleResult | None:
    """Best expected cost among trees whose worst-case cost is within budget.

    ``budget=None`` lifts the constraint entirely.  Returns None exactly when
    the budget is below the optimal worst-case cost, i.e. no valid tree fits.
    """
    if budget is None:
        return opt_expected(objects, inst)
    members = _prepare(objects, inst, DP_OBJECT_LIMIT)
    cap = budget if isinstance(budget, Fraction) else Fraction(budget)
    memo: dict[tuple[int, Fraction], tuple[Fraction, DecisionTree] | None] = {}
    worst_memo: dict[int, tuple[Fraction, DecisionTree]] = {}
    out = _budget_dp(members, cap, inst, memo, worst_memo)
    if out is None:
        return None
    value, tree = out
    return OracleResult(value=value, tree=tree, explored=len(memo))


def _path_cost_sums(
    members: frozenset[int],
    inst: Instance,
    memo: dict[int, frozenset[Fraction]],
) -> frozenset[Fraction]:
    """All root-to-leaf path costs realizable by canonical trees over a set."""
    mask = _mask_of(members)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    if inst.is_homogeneous(members):
        result = frozenset({Fraction(0)})
    else:
        sums: set[Fraction] = set()
        splits = _usable_splits(members, inst)
        if not splits:
            _raise_incomplete(members)
        for t, buckets in splits:
            for outcome, bucket in buckets.items():
                edge = inst.cost(t, outcome)
                for tail in _path_cost_sums(bucket, inst, memo):
                    sums.add(edge + tail)
        result = frozenset(sums)
    memo[mask] = result
    return result


def pareto_frontier(objects: Iterable[int], inst: Instance) -> list[FrontierPoint]:
    """The exact worst-vs-expected trade-off, one point per useful budget.

    Budgets are probed in ascending order over every realizable path cost of
    the object set; a point is kept whenever loosening the budget strictly
    improves the best expected cost.  The first point's budget is the optimal
    worst-case cost and the last point's expected cost is the unconstrained
    optimum, so the staircase spans the whole trade-off.
    """
    members = _prepare(objects, inst, DP_OBJECT_LIMIT)
    worst_memo: dict[int, tuple[Fraction, DecisionTree]] = {}
    budget_memo: dict[tuple[int, Fraction], tuple[Fraction, DecisionTree] | None] = {}
    floor, _ = _worst_dp(members, inst, worst_memo)
    unconstrained, _ = _expected_dp(members, inst, {})
    candidates = sorted(_path_cost_sums(members, inst, {}))
    points: list[FrontierPoint] = []
    for budget in candidates:
        if budget < floor:
            continue
        outcome = _budget_dp(members, budget, inst, budget_memo, worst_memo)
        assert outcome is not None  # budget >= floor makes the DP feasible
        value, tree = outcome
        if not points or value < points[-1].expected:
            points.append(FrontierPoint(budget=budget, expected=value, tree=tree))
        if value == unconstrained:
            break
    return points


def _enumerate(
    members: frozenset[int],
    inst: Instance,
    memo: dict[int, tuple[DecisionTree, ...]],
) -> tuple[DecisionTree, ...]:
    mask = _mask_of(members)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    if inst.is_homogeneous(members):
        result: tuple[DecisionTree, ...] = (_leaf_for(members, inst),)
    else:
        splits = _usable_splits(members, inst)
        if not splits:
            _raise_incomplete(members)
        trees: list[DecisionTree] = []
        for t, buckets in splits:
            outcomes = sorted(buckets)
            per_bucket = [_enumerate(buckets[o], inst, memo) for o in outcomes]
            for combo in itertools.product(*per_bucket):
                trees.append(Internal(test=t, children=dict(zip(outcomes, combo))))
        result = tuple(trees)
    memo[mask] = result
    return result


def enumerate_trees(objects: Iterable[int], inst: Instance) -> list[DecisionTree]:
    """Every canonical valid tree over a small object set.

    Canonical means single-class sets become leaves immediately; with strictly
    positive costs such trees dominate the rest, so minima over this family
    equal minima over all valid trees.  The family is exponential, hence the
    tight object cap.
    """
    members = _prepare(objects, inst, ENUMERATION_OBJECT_LIMIT)
    return list(_enumerate(members, inst, {}))
