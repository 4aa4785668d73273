"""Constraint-coupled program synthesis.

Gradient-based search over a smoothed program semantics, steered by an
incremental SAT core that pins discrete structure and learns soft conflicts.
"""

from ._gradsat import (
    Bench,
    Program,
    ProgramParseError,
    make_bench,
    parse,
    solve,
)

__all__ = [
    "Bench",
    "Program",
    "ProgramParseError",
    "make_bench",
    "parse",
    "solve",
]
