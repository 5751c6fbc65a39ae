"""Dense copies of small LPs for the exact oracles."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..lp import StandardLP

MAX_DENSE_ENTRIES = 10_000_000


class OracleError(RuntimeError):
    """Base class for oracle failures."""

    pass


class SizeGuardError(OracleError):
    """Raised when an LP is too large for a dense oracle."""

    pass


class OracleStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class DenseLP:
    """min c·x  s.t.  A x <= b,  lower <= x <= upper, stored densely."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("A must be a matrix")
        n_rows, n_cols = A.shape
        object.__setattr__(self, "A", A)
        for name, length in (("objective", n_cols), ("b", n_rows), ("lower", n_cols),
                             ("upper", n_cols)):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (length,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({length},)")
            object.__setattr__(self, name, arr)
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("dense oracles need finite variable bounds")
        if np.any(self.lower > self.upper):
            raise ValueError("lower exceeds upper")

    @property
    def n_vars(self) -> int:
        return int(self.A.shape[1])

    @property
    def n_rows(self) -> int:
        return int(self.A.shape[0])

    @classmethod
    def unit_box(cls, objective: np.ndarray, A: np.ndarray, b: np.ndarray) -> DenseLP:
        objective = np.asarray(objective, dtype=np.float64)
        return cls(objective, A, b, np.zeros_like(objective), np.ones_like(objective))

    def max_violation(self, x: np.ndarray) -> float:
        """Largest row or bound violation at x."""
        parts = [
            np.max(self.A @ x - self.b, initial=0.0),
            np.max(self.lower - x, initial=0.0),
            np.max(x - self.upper, initial=0.0),
        ]
        return float(max(parts))


@dataclass
class OracleResult:
    status: OracleStatus
    x: np.ndarray | None
    objective: float
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "objective": None if self.x is None else self.objective,
            "iterations": self.iterations,
            "primal": None if self.x is None else self.x.tolist(),
        }


def densify(lp: StandardLP, max_entries: int = MAX_DENSE_ENTRIES) -> DenseLP:
    """Exact dense copy of a standard LP.

    Raises:
        SizeGuardError: If W·L exceeds ``max_entries``.
    """
    if lp.n_vars * lp.n_rows > max_entries:
        raise SizeGuardError(
            f"LP has {lp.n_rows} x {lp.n_vars} = {lp.n_rows * lp.n_vars} dense entries, "
            f"limit is {max_entries}"
        )
    return DenseLP(lp.objective, lp.constraints.to_dense(), lp.rhs, lp.var_lower, lp.var_upper)
