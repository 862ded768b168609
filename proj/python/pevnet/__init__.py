"""Exact diffusion mechanisms for task allocation under execution uncertainty.

All quantities are returned as ``fractions.Fraction``. Scenario arguments
accept a ``Scenario`` object, a bundled scenario name or a file path.
"""

from ._pevnet import (
    ParseError,
    PreconditionError,
    Scenario,
    StructuralError,
    audit,
    bundled_scenarios,
    cli,
    critical_sequence,
    generate,
    load_scenario,
    parse_scenario,
    run,
    simulate,
)

__all__ = [
    "ParseError",
    "PreconditionError",
    "Scenario",
    "StructuralError",
    "audit",
    "bundled_scenarios",
    "cli",
    "critical_sequence",
    "generate",
    "load_scenario",
    "parse_scenario",
    "run",
    "simulate",
]
