"""File formats: instance and tree documents (JSON) and DOT export.

Both document kinds are self-contained, deterministic, and exact: rationals
travel as ``"p/q"`` strings (plain integers are accepted as shorthand for
denominator 1), so write-then-read is the identity and equal values produce
identical bytes.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Union

from dfep.model import (
    DecisionTree,
    Instance,
    Internal,
    Leaf,
    iter_leaves,
    tree_objects,
    validate_instance,
    validate_tree,
)

__all__ = [
    "export_dot",
    "format_rational",
    "instance_to_doc",
    "parse_rational",
    "read_instance",
    "read_tree",
    "tree_to_doc",
    "write_instance",
    "write_tree",
]

Pathish = Union[str, "os.PathLike[str]"]


def format_rational(value: Fraction) -> str:
    """Render exactly: ``"3"`` for integers, ``"p/q"`` otherwise."""
    return str(value)


def parse_rational(raw: Any, where: str) -> Fraction:
    """Parse an int or a "p/q" string; ``where`` names the field in errors."""
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise ValueError(f"{where}: expected an integer or a 'p/q' string, got {raw!r}")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{where}: not a rational: {raw!r} ({exc})") from None


def _load_document(path: Pathish) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed document: {exc}") from None


def _dump_document(doc: Any, path: Pathish) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def _expect_int(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValueError(f"{where}: expected an integer, got {raw!r}")
    return raw


def _expect_list(raw: Any, where: str) -> list:
    if not isinstance(raw, list):
        raise ValueError(f"{where}: expected a list, got {type(raw).__name__}")
    return raw


def _expect_mapping(raw: Any, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ValueError(f"{where}: expected an object, got {type(raw).__name__}")
    return raw


def instance_to_doc(inst: Instance) -> dict[str, Any]:
    """The plain-data form of an instance, as written to instance files."""
    doc: dict[str, Any] = {}
    if inst.name is not None:
        doc["name"] = inst.name
    doc["num_outcomes"] = inst.num_outcomes
    doc["objects"] = [
        {
            "id": s,
            "class": inst.classes[s],
            "prior": format_rational(inst.priors[s]),
        }
        for s in inst.objects
    ]
    doc["tests"] = [
        {
            "id": t,
            "costs": [format_rational(c) for c in inst.cost_table[t]],
            "outcomes": list(inst.outcome_table[t]),
        }
        for t in inst.tests
    ]
    return doc


def write_instance(inst: Instance, path: Pathish) -> None:
    _dump_document(instance_to_doc(inst), path)


def read_instance(path: Pathish, *, validate: bool = True) -> Instance:
    """Load an instance document; by default reject invalid instances.

    Structural problems (missing fields, bad ids, short cost rows) raise
    immediately with the offending field named.  With ``validate`` on,
    semantic violations found by :func:`~dfep.model.validate_instance` are
    embedded in the error as well.
    """
    doc = _expect_mapping(_load_document(path), f"{path}")
    num_outcomes = _expect_int(doc.get("num_outcomes"), f"{path}: num_outcomes")
    raw_objects = _expect_list(doc.get("objects"), f"{path}: objects")
    raw_tests = _expect_list(doc.get("tests"), f"{path}: tests")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ValueError(f"{path}: name: expected a string, got {name!r}")

    n = len(raw_objects)
    classes: list[int | None] = [None] * n
    priors: list[Fraction | None] = [None] * n
    for k, entry in enumerate(raw_objects):
        where = f"{path}: objects[{k}]"
        entry = _expect_mapping(entry, where)
        obj = _expect_int(entry.get("id"), f"{where}: id")
        if not 0 <= obj < n:
            raise ValueError(
                f"{where}: id {obj} outside 0..{n - 1} (ids must be dense)"
            )
        if classes[obj] is not None:
            raise ValueError(f"{where}: duplicate object id {obj}")
        classes[obj] = _expect_int(entry.get("class"), f"{where}: class")
        priors[obj] = parse_rational(entry.get("prior"), f"{where}: prior")

    num_tests = len(raw_tests)
    outcome_table: list[tuple[int, ...] | None] = [None] * num_tests
    cost_table: list[tuple[Fraction, ...] | None] = [None] * num_tests
    for k, entry in enumerate(raw_tests):
        where = f"{path}: tests[{k}]"
        entry = _expect_mapping(entry, where)
        t = _expect_int(entry.get("id"), f"{where}: id")
        if not 0 <= t < num_tests:
            raise ValueError(
                f"{where}: id {t} outside 0..{num_tests - 1} (ids must be dense)"
            )
        if outcome_table[t] is not None:
            raise ValueError(f"{where}: duplicate test id {t}")
        costs = _expect_list(entry.get("costs"), f"{where}: costs")
        if len(costs) < num_outcomes:
            raise ValueError(
                f"{where}: test {t} is missing the cost for outcome "
                f"{len(costs) + 1} (need one per outcome 1..{num_outcomes})"
            )
        if len(costs) > num_outcomes:
            raise ValueError(
                f"{where}: test {t} has {len(costs)} costs for {num_outcomes} outcomes"
            )
        cost_table[t] = tuple(
            parse_rational(c, f"{where}: costs[{i}] (test {t}, outcome {i + 1})")
            for i, c in enumerate(costs)
        )
        outcomes = _expect_list(entry.get("outcomes"), f"{where}: outcomes")
        if len(outcomes) != n:
            raise ValueError(
                f"{where}: test {t} needs one outcome per object (0..{n - 1}); "
                f"got {len(outcomes)}"
            )
        outcome_table[t] = tuple(
            _expect_int(o, f"{where}: outcomes[{s}]") for s, o in enumerate(outcomes)
        )

    inst = Instance(
        classes=tuple(classes),  # type: ignore[arg-type]
        num_outcomes=num_outcomes,
        outcome_table=tuple(outcome_table),  # type: ignore[arg-type]
        priors=tuple(priors),  # type: ignore[arg-type]
        cost_table=tuple(cost_table),  # type: ignore[arg-type]
        name=name,
    )
    if validate:
        problems = validate_instance(inst)
        if problems:
            raise ValueError(
                f"{path}: invalid instance:\n" + "\n".join(f"  - {p}" for p in problems)
            )
    return inst


def tree_to_doc(tree: DecisionTree) -> dict[str, Any]:
    """The plain-data form of a tree, as written to tree files."""
    if isinstance(tree, Leaf):
        return {"leaf_class": tree.class_id, "objects": sorted(tree.objects)}
    return {
        "test": tree.test,
        "children": {
            str(outcome): tree_to_doc(tree.children[outcome])
            for outcome in sorted(tree.children)
        },
    }


def _tree_from_doc(doc: Any, where: str) -> DecisionTree:
    node = _expect_mapping(doc, where)
    if "leaf_class" in node:
        extra = set(node) - {"leaf_class", "objects"}
        if extra:
            raise ValueError(f"{where}: unexpected leaf fields {sorted(extra)}")
        objects = _expect_list(node.get("objects"), f"{where}: objects")
        return Leaf(
            class_id=_expect_int(node.get("leaf_class"), f"{where}: leaf_class"),
            objects=frozenset(
                _expect_int(s, f"{where}: objects[{k}]") for k, s in enumerate(objects)
            ),
        )
    if "test" in node:
        extra = set(node) - {"test", "children"}
        if extra:
            raise ValueError(f"{where}: unexpected node fields {sorted(extra)}")
        children_doc = _expect_mapping(node.get("children"), f"{where}: children")
        children: dict[int, DecisionTree] = {}
        for key, sub in children_doc.items():
            try:
                outcome = int(key)
            except ValueError:
                raise ValueError(f"{where}: children key {key!r} is not an outcome") from None
            children[outcome] = _tree_from_doc(sub, f"{where}: children[{key}]")
        return Internal(test=_expect_int(node.get("test"), f"{where}: test"), children=children)
    raise ValueError(f"{where}: node needs either 'leaf_class' or 'test'")


def write_tree(tree: DecisionTree, path: Pathish) -> None:
    _dump_document(tree_to_doc(tree), path)


def read_tree(path: Pathish) -> DecisionTree:
    return _tree_from_doc(_load_document(path), f"{path}")


def export_dot(tree: DecisionTree, inst: Instance, path: Pathish) -> None:
    """Write the tree as a DOT digraph (deterministic bytes).

    Internal nodes are labeled ``t<test>``, edges ``outcome=i, cost=c``, and
    leaves ``class <j> {objects}``.  Nodes are numbered in pre-order with
    outcomes ascending, so equal trees export identically.
    """
    problems = validate_tree(tree, tree_objects(tree), inst)
    if problems:
        raise ValueError("refusing to export an invalid tree:\n" + "\n".join(problems))
    lines = ["digraph decision_tree {"]
    counter = 0

    def emit(node: DecisionTree) -> int:
        nonlocal counter
        this = counter
        counter += 1
        if isinstance(node, Leaf):
            members = ", ".join(str(s) for s in sorted(node.objects))
            lines.append(f'  n{this} [shape=box, label="class {node.class_id} {{{members}}}"];')
            return this
        lines.append(f'  n{this} [label="t{node.test}"];')
        for outcome in sorted(node.children):
            child = emit(node.children[outcome])
            cost = format_rational(inst.cost(node.test, outcome))
            lines.append(f'  n{this} -> n{child} [label="outcome={outcome}, cost={cost}"];')
        return this

    emit(tree)
    lines.append("}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
