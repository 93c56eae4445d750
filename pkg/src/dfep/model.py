"""Core data model for discrete function evaluation instances and decision trees.

An instance bundles a finite set of objects (identified by dense integers
``0..n-1``), a class label per object, a prior probability per object, and a
collection of tests.  Applying a test to an object yields an outcome in
``1..num_outcomes``, and each (test, outcome) pair carries a strictly positive
cost — so the price of a test may depend on the answer it returns.

A decision tree is an adaptive identification strategy: internal nodes apply
tests, branches follow outcomes, and each leaf holds a nonempty set of objects
that all share one class.  This module provides the tree/instance types plus
the handful of exact-arithmetic primitives everything else builds on:
validation, test-induced partitions, separable-pair counting, cost evaluation,
and tree restriction to a subset of objects.

All arithmetic is exact (`fractions.Fraction`); nothing in this module — or in
the packages built on it — rounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

RationalLike = Union[int, str, Fraction]

__all__ = [
    "CostReport",
    "DecisionTree",
    "Instance",
    "Internal",
    "Leaf",
    "as_fraction",
    "evaluate",
    "iter_leaves",
    "pair_count",
    "partition",
    "restrict_tree",
    "separated_pairs",
    "tree_objects",
    "validate_instance",
    "validate_tree",
]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce an int, a "p/q" string, or a Fraction to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class Instance:
    """A complete description of one identification problem.

    Fields are stored as dense tuples indexed by object/test id:

    * ``classes[s]`` — class label of object ``s`` (nonnegative int).
    * ``num_outcomes`` — size of the outcome alphabet ``1..num_outcomes``.
    * ``outcome_table[t][s]`` — outcome of test ``t`` on object ``s``.
    * ``priors[s]`` — prior probability of object ``s`` (exact rational).
    * ``cost_table[t][i-1]`` — cost of test ``t`` when it answers ``i``.

    Instances are immutable and safe to share between threads.  Use
    :meth:`create` for friendly coercion from plain lists/ints/strings;
    :func:`validate_instance` is the semantic gatekeeper.
    """

    classes: tuple[int, ...]
    num_outcomes: int
    outcome_table: tuple[tuple[int, ...], ...]
    priors: tuple[Fraction, ...]
    cost_table: tuple[tuple[Fraction, ...], ...]
    name: str | None = None

    @property
    def num_objects(self) -> int:
        return len(self.classes)

    @property
    def num_tests(self) -> int:
        return len(self.outcome_table)

    @property
    def objects(self) -> range:
        """All object ids, as a sequence."""
        return range(self.num_objects)

    @property
    def tests(self) -> range:
        """All test ids, as a sequence."""
        return range(self.num_tests)

    def class_of(self, obj: int) -> int:
        return self.classes[obj]

    def outcome(self, test: int, obj: int) -> int:
        return self.outcome_table[test][obj]

    def prior(self, obj: int) -> Fraction:
        return self.priors[obj]

    def cost(self, test: int, outcome: int) -> Fraction:
        """Cost charged when ``test`` answers ``outcome`` (1-based)."""
        return self.cost_table[test][outcome - 1]

    def mass(self, objects: Iterable[int]) -> Fraction:
        """Total prior probability of a set of objects (not renormalized)."""
        return sum((self.priors[s] for s in objects), Fraction(0))

    def is_homogeneous(self, objects: Iterable[int]) -> bool:
        """True iff every object in the (possibly empty) set shares one class."""
        seen = {self.classes[s] for s in objects}
        return len(seen) <= 1

    @classmethod
    def create(
        cls,
        classes: Sequence[int],
        outcomes: Sequence[Sequence[int]],
        *,
        priors: Sequence[RationalLike] | None = None,
        costs: Sequence[RationalLike] | Sequence[Sequence[RationalLike]] | None = None,
        num_outcomes: int | None = None,
        name: str | None = None,
    ) -> "Instance":
        """Build an instance from plain Python values.

        ``costs`` may be omitted (unit costs), given as one value per test
        (outcome-independent), or as one row of per-outcome values per test.
        ``priors`` defaults to uniform.  Shapes are checked here; semantic
        invariants (prior sum, completeness, ...) are validate_instance's job.
        """
        n = len(classes)
        if n == 0:
            raise ValueError("an instance needs at least one object")
        rows = tuple(tuple(int(v) for v in row) for row in outcomes)
        for t, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"outcomes[{t}]: expected {n} entries, got {len(row)}")
        if num_outcomes is None:
            num_outcomes = max((max(row) for row in rows if row), default=2)
            num_outcomes = max(num_outcomes, 2)
        if priors is None:
            prior_row = tuple(Fraction(1, n) for _ in range(n))
        else:
            if len(priors) != n:
                raise ValueError(f"priors: expected {n} entries, got {len(priors)}")
            prior_row = tuple(as_fraction(p) for p in priors)
        if costs is None:
            cost_rows = tuple(tuple(Fraction(1) for _ in range(num_outcomes)) for _ in rows)
        else:
            if len(costs) != len(rows):
                raise ValueError(f"costs: expected {len(rows)} entries, got {len(costs)}")
            cost_rows_list = []
            for t, entry in enumerate(costs):
                if isinstance(entry, (int, str, Fraction)):
                    row_costs = tuple(as_fraction(entry) for _ in range(num_outcomes))
                else:
                    if len(entry) != num_outcomes:
                        raise ValueError(
                            f"costs[{t}]: expected {num_outcomes} per-outcome entries, "
                            f"got {len(entry)}"
                        )
                    row_costs = tuple(as_fraction(c) for c in entry)
                cost_rows_list.append(row_costs)
            cost_rows = tuple(cost_rows_list)
        return cls(
            classes=tuple(int(c) for c in classes),
            num_outcomes=int(num_outcomes),
            outcome_table=rows,
            priors=prior_row,
            cost_table=cost_rows,
            name=name,
        )


@dataclass(frozen=True)
class Leaf:
    """Terminal node: a nonempty, single-class set of objects."""

    class_id: int
    objects: frozenset[int]


@dataclass(frozen=True)
class Internal:
    """Internal node: apply ``test`` and descend along the observed outcome.

    ``children`` maps outcome values to subtrees; only outcomes with a
    nonempty bucket appear, and a valid node has at least two of them.  The
    mapping is treated as immutable after construction.
    """

    test: int
    children: Mapping[int, "DecisionTree"]


DecisionTree = Union[Leaf, Internal]


def tree_objects(tree: DecisionTree) -> frozenset[int]:
    """The set of objects the tree classifies (union of its leaf sets)."""
    if isinstance(tree, Leaf):
        return tree.objects
    out: set[int] = set()
    for child in tree.children.values():
        out |= tree_objects(child)
    return frozenset(out)


def iter_leaves(tree: DecisionTree) -> Iterator[Leaf]:
    """Yield leaves in pre-order, visiting outcomes in ascending order."""
    if isinstance(tree, Leaf):
        yield tree
        return
    for outcome in sorted(tree.children):
        yield from iter_leaves(tree.children[outcome])


@dataclass(frozen=True)
class CostReport:
    """Cost of running a tree: per-object path costs plus both aggregates.

    ``worst`` is the maximum per-object path cost; ``expected`` weights each
    path cost by the object's prior (no renormalization, so reports for trees
    over subsets compose additively).
    """

    worst: Fraction
    expected: Fraction
    per_object: Mapping[int, Fraction]


def _check_test(test: int, inst: Instance) -> None:
    if not 0 <= test < inst.num_tests:
        raise ValueError(f"no such test: {test}")


def _check_objects(objects: Iterable[int], inst: Instance) -> frozenset[int]:
    out = frozenset(objects)
    bad = [s for s in out if not 0 <= s < inst.num_objects]
    if bad:
        raise ValueError(f"no such object(s): {sorted(bad)}")
    return out


def validate_instance(inst: Instance) -> list[str]:
    """Check every instance invariant; return all violations (empty = ok).

    Violations are data, not exceptions: each is a human-readable string
    naming the broken invariant and a witness.  Structural problems (ragged
    tables) are reported first and suppress the semantic checks that would
    trip over them.
    """
    violations: list[str] = []
    n = inst.num_objects
    if n == 0:
        return ["instance has no objects"]
    if inst.num_outcomes < 2:
        violations.append(f"num_outcomes must be at least 2, got {inst.num_outcomes}")

    structural = False
    if len(inst.priors) != n:
        violations.append(f"priors: expected {n} entries, got {len(inst.priors)}")
        structural = True
    for t, row in enumerate(inst.outcome_table):
        if len(row) != n:
            violations.append(f"outcomes of test {t}: expected {n} entries, got {len(row)}")
            structural = True
    for t, row in enumerate(inst.cost_table):
        if len(row) != inst.num_outcomes:
            violations.append(
                f"costs of test {t}: expected {inst.num_outcomes} entries, got {len(row)}"
            )
            structural = True
    if len(inst.cost_table) != inst.num_tests:
        violations.append(
            f"cost table covers {len(inst.cost_table)} tests, expected {inst.num_tests}"
        )
        structural = True
    if structural:
        return violations

    for s, cls in enumerate(inst.classes):
        if cls < 0:
            violations.append(f"object {s} has negative class id {cls}")
    for t, row in enumerate(inst.outcome_table):
        for s, outcome in enumerate(row):
            if not 1 <= outcome <= inst.num_outcomes:
                violations.append(
                    f"outcome of test {t} on object {s} is {outcome}, "
                    f"outside 1..{inst.num_outcomes}"
                )
    for s, p in enumerate(inst.priors):
        if p < 0:
            violations.append(f"prior of object {s} is negative ({p})")
    total = sum(inst.priors, Fraction(0))
    if total != 1:
        violations.append(f"prior sums to {total}, not 1")
    for t, row in enumerate(inst.cost_table):
        for i, c in enumerate(row, start=1):
            if c <= 0:
                violations.append(f"cost of test {t} on outcome {i} is {c}, not positive")

    # Completeness: objects of different classes must be told apart by a test.
    for a in range(n):
        for b in range(a + 1, n):
            if inst.classes[a] != inst.classes[b] and all(
                row[a] == row[b] for row in inst.outcome_table
            ):
                violations.append(f"completeness: objects {a} and {b} are never separated")
    return violations


def partition(objects: Iterable[int], test: int, inst: Instance) -> dict[int, frozenset[int]]:
    """Split a set of objects by their outcome under one test.

    Returns ``{outcome: bucket}`` with empty buckets omitted and keys in
    ascending outcome order.
    """
    _check_test(test, inst)
    members = _check_objects(objects, inst)
    buckets: dict[int, set[int]] = {}
    row = inst.outcome_table[test]
    for s in members:
        buckets.setdefault(row[s], set()).add(s)
    return {outcome: frozenset(buckets[outcome]) for outcome in sorted(buckets)}


def pair_count(objects: Iterable[int], inst: Instance) -> int:
    """Number of separable pairs: unordered pairs from different classes."""
    members = _check_objects(objects, inst)
    counts = Counter(inst.classes[s] for s in members)
    total = sum(counts.values())
    return (total * total - sum(c * c for c in counts.values())) // 2


def separated_pairs(objects: Iterable[int], test: int, inst: Instance) -> int:
    """Number of separable pairs the test resolves (differing outcomes).

    Counted directly from a class-by-outcome histogram, so the decomposition
    ``pair_count(G) == separated_pairs(G, t) + sum of pair_count over buckets``
    is a genuine cross-check rather than a restatement.
    """
    _check_test(test, inst)
    members = _check_objects(objects, inst)
    histogram: dict[int, Counter] = {}
    row = inst.outcome_table[test]
    for s in members:
        histogram.setdefault(inst.classes[s], Counter())[row[s]] += 1
    labels = sorted(histogram)
    separated = 0
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            na = sum(histogram[a].values())
            nb = sum(histogram[b].values())
            same_outcome = sum(histogram[a][o] * histogram[b][o] for o in histogram[a])
            separated += na * nb - same_outcome
    return separated


def evaluate(tree: DecisionTree, inst: Instance) -> CostReport:
    """Walk the tree and price every object's root-to-leaf path.

    Each edge leaving a node with test ``t`` along outcome ``i`` contributes
    ``inst.cost(t, i)``; a single leaf therefore costs nothing.  Raises if the
    tree mentions a test or object the instance does not know.
    """
    per_object: dict[int, Fraction] = {}

    def walk(node: DecisionTree, acc: Fraction) -> None:
        if isinstance(node, Leaf):
            for s in node.objects:
                if not 0 <= s < inst.num_objects:
                    raise ValueError(f"tree references unknown object {s}")
                per_object[s] = acc
            return
        _check_test(node.test, inst)
        for outcome in sorted(node.children):
            if not 1 <= outcome <= inst.num_outcomes:
                raise ValueError(
                    f"tree references outcome {outcome} outside 1..{inst.num_outcomes}"
                )
            walk(node.children[outcome], acc + inst.cost(node.test, outcome))

    walk(tree, Fraction(0))
    worst = max(per_object.values(), default=Fraction(0))
    expected = sum((cost * inst.priors[s] for s, cost in per_object.items()), Fraction(0))
    return CostReport(worst=worst, expected=expected, per_object=per_object)


def validate_tree(tree: DecisionTree, objects: Iterable[int], inst: Instance) -> list[str]:
    """Check that a tree is a valid strategy for the given object set.

    Verifies, per node: leaves are nonempty, homogeneous, and correctly
    labeled; internal nodes have at least two children whose object sets are
    exactly the test-induced partition of the node's set.  Violations are
    returned as strings (empty list = ok).
    """
    violations: list[str] = []
    try:
        expected_root = _check_objects(objects, inst)
    except ValueError as exc:
        return [str(exc)]

    def walk(node: DecisionTree, expected: frozenset[int], path: str) -> None:
        if isinstance(node, Leaf):
            if node.objects != expected:
                violations.append(
                    f"{path}: leaf holds {sorted(node.objects)} but should hold "
                    f"{sorted(expected)}"
                )
            if not node.objects:
                violations.append(f"{path}: empty leaf")
                return
            labels = {inst.classes[s] for s in node.objects if 0 <= s < inst.num_objects}
            unknown = [s for s in node.objects if not 0 <= s < inst.num_objects]
            if unknown:
                violations.append(f"{path}: leaf references unknown objects {sorted(unknown)}")
                return
            if len(labels) > 1:
                violations.append(f"{path}: leaf not homogeneous (classes {sorted(labels)})")
            elif labels != {node.class_id}:
                violations.append(
                    f"{path}: leaf labeled class {node.class_id} but objects are "
                    f"class {labels.pop()}"
                )
            return
        if not 0 <= node.test < inst.num_tests:
            violations.append(f"{path}: unknown test {node.test}")
            return
        buckets = partition(expected, node.test, inst)
        if len(node.children) < 2:
            violations.append(f"{path}: internal node with {len(node.children)} child(ren)")
        if set(node.children) != set(buckets):
            violations.append(
                f"{path}: children cover outcomes {sorted(node.children)} but test "
                f"{node.test} splits this set into outcomes {sorted(buckets)}"
            )
            return
        for outcome in sorted(node.children):
            walk(node.children[outcome], buckets[outcome], f"{path}.{outcome}")

    walk(tree, expected_root, "root")
    return violations


def restrict_tree(tree: DecisionTree, keep: Iterable[int], inst: Instance) -> DecisionTree:
    """Project a tree onto a subset of its objects.

    Dropped objects disappear from leaves; branches left empty are deleted;
    an internal node left with a single live branch is contracted (its edge —
    and that edge's cost — vanish); any subtree whose survivors all share one
    class collapses to a leaf.  No surviving object's path cost ever
    increases, which is what makes restrictions safe to splice into other
    trees.
    """
    wanted = frozenset(keep)
    if not wanted:
        raise ValueError("cannot restrict a tree to an empty object set")
    root_objects = tree_objects(tree)
    if not wanted <= root_objects:
        missing = sorted(wanted - root_objects)
        raise ValueError(f"objects {missing} are not in the tree")

    def shrink(node: DecisionTree, survivors: frozenset[int]) -> DecisionTree:
        labels = {inst.classes[s] for s in survivors}
        if len(labels) == 1:
            return Leaf(class_id=labels.pop(), objects=survivors)
        # Mixed classes, so the node cannot be a leaf (leaf sets are
        # homogeneous and stay that way under subsetting).
        assert isinstance(node, Internal)
        live: list[tuple[int, DecisionTree, frozenset[int]]] = []
        for outcome in sorted(node.children):
            child = node.children[outcome]
            child_survivors = tree_objects(child) & survivors
            if child_survivors:
                live.append((outcome, child, child_survivors))
        if len(live) == 1:
            _, child, child_survivors = live[0]
            return shrink(child, child_survivors)
        return Internal(
            test=node.test,
            children={outcome: shrink(child, surv) for outcome, child, surv in live},
        )

    return shrink(tree, wanted)
