"""Instance generation, file formats, the experiment runner, and the CLI."""

from dfep.harness.experiment import (
    BoundViolation,
    ExperimentConfig,
    ExperimentRow,
    TradeOffOutcome,
    load_config,
    run_experiment,
    write_table,
)
from dfep.harness.generate import GeneratorSpec, generate
from dfep.harness.io import (
    export_dot,
    format_rational,
    parse_rational,
    read_instance,
    read_tree,
    write_instance,
    write_tree,
)

__all__ = [
    "BoundViolation",
    "ExperimentConfig",
    "ExperimentRow",
    "GeneratorSpec",
    "TradeOffOutcome",
    "export_dot",
    "format_rational",
    "generate",
    "load_config",
    "parse_rational",
    "read_instance",
    "read_tree",
    "run_experiment",
    "write_instance",
    "write_table",
    "write_tree",
]
