"""Batch experiment runner: generate, solve, splice, and check every bound.

One run draws a batch of seeded random instances and, per instance, computes
the exact optima, runs the greedy builder, splices the two oracle trees
across a trade-off grid, and sweeps the unit-cost variant where it applies.
Every guarantee the library makes is then checked as an exact inequality:

* greedy worst-case within the harmonic cap of the optimum (binary tests);
* the root lower bound really below the optimal worst case (binary tests);
* optima only shrinking on subsets;
* splice results under their worst-case cap (answer-independent prices
  only — a two-object instance in the test suite proves the cap is
  unachievable in general) and under their expected-cost cap (always);
* sweep results under both unit-cost caps.

A violated bound is not logged and skipped: the offending instance, trees,
and parameters are serialized to a replay file and the run aborts with
:class:`BoundViolation`.  Row flags are exposed as properties recomputed
from the stored rationals, so a saved table can never disagree with its own
numbers.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from dfep.combine import combine_trees, combine_uniform
from dfep.greedy import divide_pairs, root_lower_bound
from dfep.harness.generate import COST_MODES, PRIOR_MODES, GeneratorSpec, generate
from dfep.harness.io import (
    format_rational,
    instance_to_doc,
    parse_rational,
    tree_to_doc,
)
from dfep.model import DecisionTree, Instance, evaluate, pair_count
from dfep.oracle import DP_OBJECT_LIMIT, harmonic, opt_expected, opt_worst

__all__ = [
    "BoundViolation",
    "ExperimentConfig",
    "ExperimentRow",
    "TradeOffOutcome",
    "load_config",
    "run_experiment",
    "write_table",
]

DEFAULT_RHO_GRID = (
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(1),
    Fraction(2),
    Fraction(4),
)
DEFAULT_UNIFORM_TRADE_OFFS = (1, 2)


class BoundViolation(RuntimeError):
    """A guarantee failed on a concrete instance; replay data was saved."""

    def __init__(self, message: str, replay_path: str):
        super().__init__(f"{message} (replay saved to {replay_path})")
        self.replay_path = replay_path


@dataclass(frozen=True)
class ExperimentConfig:
    """One batch: sizes are inclusive [low, high] ranges, draws are seeded."""

    seed: int = 0
    count: int = 10
    objects: tuple[int, int] = (2, 8)
    classes: tuple[int, int] = (2, 4)
    tests: tuple[int, int] = (3, 6)
    outcomes: int = 2
    cost_mode: str = "unit"
    cost_range: tuple[int, int] = (1, 8)
    prior_mode: str = "random"
    rho_grid: tuple[Fraction, ...] = DEFAULT_RHO_GRID
    uniform_trade_offs: tuple[int, ...] = DEFAULT_UNIFORM_TRADE_OFFS
    oracle_checks: bool = True
    replay_path: str = "bound-violation.json"


@dataclass(frozen=True)
class TradeOffOutcome:
    """One spliced tree's exact costs next to the caps it was promised.

    ``worst_cap_applies`` records whether the worst-case cap is promised at
    all (it is not when test prices depend on answers).  The pass/fail flags
    are properties over the stored rationals, never stored themselves.
    """

    variant: str  # "splice" or "uniform-sweep"
    trade_off: Fraction
    achieved_worst: Fraction
    achieved_expected: Fraction
    worst_cap: Fraction
    expected_cap: Fraction
    worst_cap_applies: bool

    @property
    def worst_ok(self) -> bool:
        return not self.worst_cap_applies or self.achieved_worst <= self.worst_cap

    @property
    def expected_ok(self) -> bool:
        return self.achieved_expected <= self.expected_cap


@dataclass(frozen=True)
class ExperimentRow:
    """Everything measured on one instance, all of it exact."""

    index: int
    seed: int
    name: str
    num_objects: int
    num_classes: int
    num_tests: int
    num_outcomes: int
    cost_mode: str
    separable_pairs: int
    greedy_worst: Fraction
    greedy_expected: Fraction
    lower_bound: Fraction
    opt_worst: Fraction | None
    opt_expected: Fraction | None
    trade_offs: tuple[TradeOffOutcome, ...]

    @property
    def harmonic_cap(self) -> Fraction | None:
        """Greedy worst-case budget: harmonic(pairs) times the optimum."""
        if self.opt_worst is None:
            return None
        return harmonic(self.separable_pairs) * self.opt_worst

    @property
    def greedy_ratio(self) -> Fraction | None:
        if self.opt_worst is None or self.opt_worst == 0:
            return None
        return self.greedy_worst / self.opt_worst

    @property
    def greedy_within_cap(self) -> bool | None:
        cap = self.harmonic_cap
        if cap is None:
            return None
        return self.greedy_worst <= cap

    @property
    def lower_bound_ok(self) -> bool | None:
        if self.opt_worst is None:
            return None
        return self.lower_bound <= self.opt_worst


def _as_range(raw: Any, where: str) -> tuple[int, int]:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return (raw, raw)
    if (
        isinstance(raw, list)
        and len(raw) == 2
        and all(isinstance(v, int) and not isinstance(v, bool) for v in raw)
    ):
        low, high = raw
        if low > high:
            raise ValueError(f"{where}: empty range [{low}, {high}]")
        return (low, high)
    raise ValueError(f"{where}: expected an integer or a [low, high] pair, got {raw!r}")


_CONFIG_KEYS = {
    "seed",
    "count",
    "objects",
    "classes",
    "tests",
    "outcomes",
    "cost_mode",
    "cost_range",
    "prior_mode",
    "rho_grid",
    "uniform_trade_offs",
    "oracle_checks",
    "replay_path",
}


def load_config(path: str) -> ExperimentConfig:
    """Read a batch description from a JSON file (unknown keys rejected)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a configuration object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown configuration keys {sorted(unknown)}")
    base = ExperimentConfig()
    kwargs: dict[str, Any] = {}
    if "seed" in doc:
        kwargs["seed"] = int(doc["seed"])
    if "count" in doc:
        kwargs["count"] = int(doc["count"])
    for key in ("objects", "classes", "tests", "cost_range"):
        if key in doc:
            kwargs[key] = _as_range(doc[key], f"{path}: {key}")
    if "outcomes" in doc:
        kwargs["outcomes"] = int(doc["outcomes"])
    if "cost_mode" in doc:
        kwargs["cost_mode"] = str(doc["cost_mode"])
    if "prior_mode" in doc:
        kwargs["prior_mode"] = str(doc["prior_mode"])
    if "rho_grid" in doc:
        grid = doc["rho_grid"]
        if not isinstance(grid, list) or not grid:
            raise ValueError(f"{path}: rho_grid: expected a nonempty list")
        kwargs["rho_grid"] = tuple(
            parse_rational(entry, f"{path}: rho_grid[{k}]") for k, entry in enumerate(grid)
        )
        if any(r <= 0 for r in kwargs["rho_grid"]):
            raise ValueError(f"{path}: rho_grid: trade-offs must be positive")
    if "uniform_trade_offs" in doc:
        offs = doc["uniform_trade_offs"]
        if not isinstance(offs, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in offs
        ):
            raise ValueError(
                f"{path}: uniform_trade_offs: expected a list of positive integers"
            )
        kwargs["uniform_trade_offs"] = tuple(offs)
    if "oracle_checks" in doc:
        if not isinstance(doc["oracle_checks"], bool):
            raise ValueError(f"{path}: oracle_checks: expected true or false")
        kwargs["oracle_checks"] = doc["oracle_checks"]
    if "replay_path" in doc:
        kwargs["replay_path"] = str(doc["replay_path"])
    config = dataclasses.replace(base, **kwargs)
    if config.count < 1:
        raise ValueError(f"{path}: count must be positive")
    if config.cost_mode not in COST_MODES:
        raise ValueError(f"{path}: unknown cost mode {config.cost_mode!r}")
    if config.prior_mode not in PRIOR_MODES:
        raise ValueError(f"{path}: unknown prior mode {config.prior_mode!r}")
    return config


def _save_replay(
    config: ExperimentConfig,
    inst: Instance,
    check: str,
    details: dict[str, Any],
    trees: dict[str, DecisionTree],
) -> str:
    doc = {
        "check": check,
        "details": details,
        "instance": instance_to_doc(inst),
        "trees": {label: tree_to_doc(tree) for label, tree in sorted(trees.items())},
    }
    with open(config.replay_path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
    return config.replay_path


def _violate(
    config: ExperimentConfig,
    inst: Instance,
    check: str,
    details: dict[str, Any],
    trees: dict[str, DecisionTree],
) -> None:
    path = _save_replay(config, inst, check, details, trees)
    summary = ", ".join(f"{k}={v}" for k, v in details.items())
    raise BoundViolation(f"{check} failed on instance {inst.name!r}: {summary}", path)


def _has_flat_prices(inst: Instance) -> bool:
    return all(len(set(row)) == 1 for row in inst.cost_table)


def _has_unit_prices(inst: Instance) -> bool:
    return all(c == 1 for row in inst.cost_table for c in row)


def run_experiment(
    config: ExperimentConfig, table_path: str | None = None
) -> list[ExperimentRow]:
    """Run one batch; return its rows (and optionally write the table).

    Raises :class:`BoundViolation` the moment any exact bound check fails;
    raises ValueError when the config asks for oracle checks on instances
    beyond the solver's size cap.
    """
    if config.oracle_checks and config.objects[1] > DP_OBJECT_LIMIT:
        raise ValueError(
            f"configured object count up to {config.objects[1]} exceeds oracle cap "
            f"({DP_OBJECT_LIMIT}); disable oracle_checks to generate larger instances"
        )
    rng = random.Random(config.seed)
    rows: list[ExperimentRow] = []
    for index in range(config.count):
        size = rng.randint(*config.objects)
        class_low = min(config.classes[0], size)
        class_high = min(config.classes[1], size)
        spec = GeneratorSpec(
            num_objects=size,
            num_classes=rng.randint(class_low, class_high),
            num_tests=rng.randint(*config.tests),
            num_outcomes=config.outcomes,
            cost_mode=config.cost_mode,
            cost_range=config.cost_range,
            prior_mode=config.prior_mode,
            seed=rng.getrandbits(32),
            name=f"run{index}",
        )
        inst = generate(spec)
        everything = frozenset(inst.objects)
        pairs = pair_count(everything, inst)
        greedy_tree = divide_pairs(everything, inst)
        greedy_report = evaluate(greedy_tree, inst)
        lower = root_lower_bound(everything, inst)

        best_worst: Fraction | None = None
        best_expected: Fraction | None = None
        trade_offs: list[TradeOffOutcome] = []
        if config.oracle_checks:
            worst_result = opt_worst(everything, inst)
            expected_result = opt_expected(everything, inst)
            best_worst = worst_result.value
            best_expected = expected_result.value
            binary = inst.num_outcomes == 2

            if binary and greedy_report.worst > harmonic(pairs) * best_worst:
                _violate(
                    config,
                    inst,
                    "greedy harmonic cap",
                    {
                        "achieved": format_rational(greedy_report.worst),
                        "cap": format_rational(harmonic(pairs) * best_worst),
                    },
                    {"greedy": greedy_tree, "optimal_worst": worst_result.tree},
                )
            if binary and lower > best_worst:
                _violate(
                    config,
                    inst,
                    "root lower bound",
                    {
                        "lower_bound": format_rational(lower),
                        "optimum": format_rational(best_worst),
                    },
                    {"optimal_worst": worst_result.tree},
                )

            subset = frozenset(s for s in everything if rng.random() < 0.5)
            if not subset:
                subset = frozenset({min(everything)})
            sub_worst = opt_worst(subset, inst).value
            sub_expected = opt_expected(subset, inst).value
            if sub_worst > best_worst or sub_expected > best_expected:
                _violate(
                    config,
                    inst,
                    "subset monotonicity",
                    {
                        "subset": ",".join(str(s) for s in sorted(subset)),
                        "subset_worst": format_rational(sub_worst),
                        "full_worst": format_rational(best_worst),
                        "subset_expected": format_rational(sub_expected),
                        "full_expected": format_rational(best_expected),
                    },
                    {},
                )

            flat = _has_flat_prices(inst)
            for ratio in config.rho_grid:
                spliced = combine_trees(
                    expected_result.tree, worst_result.tree, ratio, inst
                )
                report = evaluate(spliced, inst)
                outcome = TradeOffOutcome(
                    variant="splice",
                    trade_off=ratio,
                    achieved_worst=report.worst,
                    achieved_expected=report.expected,
                    worst_cap=(1 + ratio) * best_worst,
                    expected_cap=(1 + 1 / ratio) * best_expected,
                    worst_cap_applies=flat,
                )
                trade_offs.append(outcome)
                if not outcome.worst_ok or not outcome.expected_ok:
                    _violate(
                        config,
                        inst,
                        "splice caps",
                        {
                            "trade_off": format_rational(ratio),
                            "worst": format_rational(report.worst),
                            "worst_cap": format_rational(outcome.worst_cap),
                            "expected": format_rational(report.expected),
                            "expected_cap": format_rational(outcome.expected_cap),
                        },
                        {
                            "expected_tree": expected_result.tree,
                            "worst_case_tree": worst_result.tree,
                            "result": spliced,
                        },
                    )

            if _has_unit_prices(inst) and best_worst >= 1:
                reference = int(best_worst)
                for factor in config.uniform_trade_offs:
                    numerator = factor * reference
                    chosen = combine_uniform(
                        expected_result.tree, worst_result.tree, numerator, inst
                    )
                    report = evaluate(chosen, inst)
                    ratio = Fraction(factor)
                    outcome = TradeOffOutcome(
                        variant="uniform-sweep",
                        trade_off=ratio,
                        achieved_worst=report.worst,
                        achieved_expected=report.expected,
                        worst_cap=Fraction(numerator + reference),
                        expected_cap=(1 + 2 / (ratio * ratio + 2 * ratio))
                        * best_expected,
                        worst_cap_applies=True,
                    )
                    trade_offs.append(outcome)
                    if not outcome.worst_ok or not outcome.expected_ok:
                        _violate(
                            config,
                            inst,
                            "uniform sweep caps",
                            {
                                "trade_off": format_rational(ratio),
                                "worst": format_rational(report.worst),
                                "worst_cap": format_rational(outcome.worst_cap),
                                "expected": format_rational(report.expected),
                                "expected_cap": format_rational(outcome.expected_cap),
                            },
                            {
                                "expected_tree": expected_result.tree,
                                "worst_case_tree": worst_result.tree,
                                "result": chosen,
                            },
                        )

        rows.append(
            ExperimentRow(
                index=index,
                seed=spec.seed,
                name=inst.name or "",
                num_objects=inst.num_objects,
                num_classes=len(set(inst.classes)),
                num_tests=inst.num_tests,
                num_outcomes=inst.num_outcomes,
                cost_mode=config.cost_mode,
                separable_pairs=pairs,
                greedy_worst=greedy_report.worst,
                greedy_expected=greedy_report.expected,
                lower_bound=lower,
                opt_worst=best_worst,
                opt_expected=best_expected,
                trade_offs=tuple(trade_offs),
            )
        )
    if table_path is not None:
        write_table(rows, table_path)
    return rows


_TABLE_COLUMNS = (
    "index",
    "seed",
    "name",
    "objects",
    "classes",
    "tests",
    "outcome_alphabet",
    "cost_mode",
    "pairs",
    "opt_worst",
    "opt_expected",
    "greedy_worst",
    "greedy_expected",
    "greedy_cap",
    "greedy_ratio",
    "lower_bound",
    "variant",
    "trade_off",
    "achieved_worst",
    "worst_cap",
    "worst_ok",
    "achieved_expected",
    "expected_cap",
    "expected_ok",
)


def _maybe(value: Fraction | None) -> str:
    return "-" if value is None else format_rational(value)


def _flag(value: bool | None) -> str:
    if value is None:
        return "-"
    return "yes" if value else "no"


def write_table(rows: Sequence[ExperimentRow], path: str) -> None:
    """Write rows as a long-format TSV: one line per trade-off outcome.

    Instances with no trade-off outcomes (oracle checks disabled) still get
    one line, with the trade-off columns blank.  All numbers are exact.
    """
    lines = ["\t".join(_TABLE_COLUMNS)]
    for row in rows:
        base = [
            str(row.index),
            str(row.seed),
            row.name,
            str(row.num_objects),
            str(row.num_classes),
            str(row.num_tests),
            str(row.num_outcomes),
            row.cost_mode,
            str(row.separable_pairs),
            _maybe(row.opt_worst),
            _maybe(row.opt_expected),
            format_rational(row.greedy_worst),
            format_rational(row.greedy_expected),
            _maybe(row.harmonic_cap),
            _maybe(row.greedy_ratio),
            format_rational(row.lower_bound),
        ]
        outcomes = row.trade_offs or (None,)
        for outcome in outcomes:
            if outcome is None:
                tail = ["-", "-", "-", "-", "-", "-", "-", "-"]
            else:
                tail = [
                    outcome.variant,
                    format_rational(outcome.trade_off),
                    format_rational(outcome.achieved_worst),
                    format_rational(outcome.worst_cap),
                    _flag(outcome.worst_ok),
                    format_rational(outcome.achieved_expected),
                    format_rational(outcome.expected_cap),
                    _flag(outcome.expected_ok),
                ]
            lines.append("\t".join(base + tail))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
