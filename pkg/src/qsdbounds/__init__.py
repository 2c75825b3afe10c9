"""Finite-copy quantum binary state discrimination: bounds, restricted strategies, circuits."""
from .bounds import (
    ChernoffResult,
    ExponentReport,
    chernoff_numeric,
    delta,
    delta_epsilon,
    diagnostics,
    helstrom_example1,
    helstrom_general,
    helstrom_pure,
)
from .states import (
    DensityMatrix,
    Example1Params,
    Example2Params,
    Example3Params,
    StatePair,
    build_example1,
    build_example2,
    build_example3,
)

__version__ = "0.1.0"

__all__ = [
    "ChernoffResult",
    "DensityMatrix",
    "Example1Params",
    "Example2Params",
    "Example3Params",
    "ExponentReport",
    "StatePair",
    "build_example1",
    "build_example2",
    "build_example3",
    "chernoff_numeric",
    "delta",
    "delta_epsilon",
    "diagnostics",
    "helstrom_example1",
    "helstrom_general",
    "helstrom_pure",
]
