"""Exact dense oracles for cross-checking the first-order solver."""

from .dense import (
    MAX_DENSE_ENTRIES,
    DenseLP,
    OracleError,
    OracleResult,
    OracleStatus,
    SizeGuardError,
    densify,
)
from .simplex import SimplexBreakdownError, simplex_solve
from .vertex import vertex_enumerate

__all__ = [
    "MAX_DENSE_ENTRIES",
    "DenseLP",
    "OracleError",
    "OracleResult",
    "OracleStatus",
    "SimplexBreakdownError",
    "SizeGuardError",
    "densify",
    "simplex_solve",
    "vertex_enumerate",
]
