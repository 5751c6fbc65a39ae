"""Standard-form LP: min p·x  s.t.  Gx <= h,  lower <= x <= upper."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from ..sparse import SparseMatrix, csr_from_arrays


class LPFormatError(ValueError):
    """Raised when LP data is inconsistent or cannot be decoded."""

    pass


class VariableKind(Enum):
    """What an LP column stands for."""

    CUSTOMER_ACTION = "customer_action"  # x_i^j
    SEGMENT_ACTION = "segment_action"  # x_{k*}^j
    SINGLE_ACTION = "single_action"  # z_i^j
    ACTION_PAIR = "action_pair"  # y_i^{j1,j2}
    AUXILIARY = "auxiliary"  # x_i^j linked to z and y
    GENERIC = "generic"


@dataclass(frozen=True)
class ColumnLabel:
    """Identity of one LP column.

    ``owner`` is a customer index, or an action-segment index for
    SEGMENT_ACTION columns. ``action2`` is set only for ACTION_PAIR.
    """

    kind: VariableKind
    owner: int
    action: int
    action2: int | None = None

    def to_list(self) -> list[Any]:
        return [self.kind.value, self.owner, self.action, self.action2]

    @classmethod
    def from_list(cls, data: list[Any]) -> ColumnLabel:
        kind, owner, action, action2 = data
        second = None if action2 is None else int(action2)
        return cls(VariableKind(kind), int(owner), int(action), second)


@dataclass(frozen=True, eq=False)
class StandardLP:
    """A linear program in the solver's inequality form.

    Attributes:
        objective: Cost vector p (compiled targeting LPs store negated profits).
        constraints: G, one row per one-sided inequality.
        rhs: h.
        var_lower: Lower bounds (zeros for compiled LPs).
        var_upper: Upper bounds (ones for compiled LPs).
        column_labels: One label per column.
        row_blocks: Family name -> (start, stop) row range, in emission order.
    """

    objective: np.ndarray
    constraints: SparseMatrix
    rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray
    column_labels: tuple[ColumnLabel, ...] = ()
    row_blocks: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n_rows, n_cols = self.constraints.shape
        for name, length in (
            ("objective", n_cols),
            ("rhs", n_rows),
            ("var_lower", n_cols),
            ("var_upper", n_cols),
        ):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (length,):
                raise LPFormatError(f"{name} has shape {arr.shape}, expected ({length},)")
            object.__setattr__(self, name, arr)

        if not np.all(np.isfinite(self.objective)) or not np.all(np.isfinite(self.rhs)):
            raise LPFormatError("objective and rhs must be finite")
        if np.any(np.isnan(self.var_lower)) or np.any(np.isnan(self.var_upper)):
            raise LPFormatError("bounds must not be NaN")
        if np.any(self.var_lower > self.var_upper):
            raise LPFormatError("var_lower exceeds var_upper")
        if self.column_labels and len(self.column_labels) != n_cols:
            raise LPFormatError("column_labels must have one entry per column")
        if not self.column_labels:
            object.__setattr__(
                self,
                "column_labels",
                tuple(ColumnLabel(VariableKind.GENERIC, w, 0) for w in range(n_cols)),
            )

    @property
    def n_vars(self) -> int:
        """W, the number of columns."""
        return self.constraints.n_cols

    @property
    def n_rows(self) -> int:
        """L, the number of inequality rows."""
        return self.constraints.n_rows

    @property
    def is_unit_box(self) -> bool:
        return bool(np.all(self.var_lower == 0.0) and np.all(self.var_upper == 1.0))

    def family_counts(self) -> dict[str, int]:
        """Row count per constraint family."""
        return {name: stop - start for name, (start, stop) in self.row_blocks.items()}

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective @ x)

    def to_dict(self) -> dict[str, Any]:
        """LP triplet JSON: the sparse triplet format plus vectors and labels."""
        data = self.constraints.to_dict()
        data.update(
            {
                "objective": self.objective.tolist(),
                "rhs": self.rhs.tolist(),
                "var_lower": _encode_bounds(self.var_lower),
                "var_upper": _encode_bounds(self.var_upper),
                "labels": [label.to_list() for label in self.column_labels],
                "row_blocks": {k: list(v) for k, v in self.row_blocks.items()},
            }
        )
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> StandardLP:
        try:
            matrix = SparseMatrix.from_dict(data)
            n_cols = matrix.n_cols
            lower = _decode_bounds(data.get("var_lower", [0.0] * n_cols))
            upper = _decode_bounds(data.get("var_upper", [1.0] * n_cols))
            labels = tuple(ColumnLabel.from_list(item) for item in data.get("labels", []))
            blocks = {k: (int(v[0]), int(v[1])) for k, v in data.get("row_blocks", {}).items()}
            return cls(
                objective=np.asarray(data["objective"], dtype=np.float64),
                constraints=matrix,
                rhs=np.asarray(data["rhs"], dtype=np.float64),
                var_lower=lower,
                var_upper=upper,
                column_labels=labels,
                row_blocks=blocks,
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, LPFormatError):
                raise
            raise LPFormatError(f"invalid LP JSON: {e}") from e


def _encode_bounds(values: np.ndarray) -> list[float | str]:
    return [("inf" if v > 0 else "-inf") if np.isinf(v) else float(v) for v in values]


def _decode_bounds(values: list[Any]) -> np.ndarray:
    return np.array([float(v) for v in values], dtype=np.float64)


def unit_box_lp(
    objective: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    vals: np.ndarray,
    rhs: np.ndarray,
    column_labels: tuple[ColumnLabel, ...] = (),
    row_blocks: dict[str, tuple[int, int]] | None = None,
) -> StandardLP:
    """Assemble an LP with 0 <= x <= 1 from coordinate arrays."""
    objective = np.asarray(objective, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    matrix = csr_from_arrays(rhs.shape[0], objective.shape[0], rows, cols, vals)
    return StandardLP(
        objective=objective,
        constraints=matrix,
        rhs=rhs,
        var_lower=np.zeros(objective.shape[0]),
        var_upper=np.ones(objective.shape[0]),
        column_labels=column_labels,
        row_blocks=row_blocks or {},
    )


def save_lp(lp: StandardLP, path: Path) -> None:
    """Write LP triplet JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(lp.to_dict(), f)


def load_lp(path: Path) -> StandardLP:
    """Read LP triplet JSON."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise LPFormatError(f"invalid JSON in {path}: {e}") from e
    return StandardLP.from_dict(data)
