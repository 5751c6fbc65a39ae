"""Box-constrained bilinear saddle problems.

    min_{x∈X} max_{y∈Y}  L(x, y) = p·x + y·(Gx − h)

For a compiled LP, X is the variable box and Y = {y >= 0}. Rescaled LPs and
the toy problem use general boxes on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lp import StandardLP
from ..sparse import RescalingDiagonals, SparseMatrix


def project_primal(v: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] coordinatewise."""
    return np.clip(v, 0.0, 1.0)


def project_dual(v: np.ndarray) -> np.ndarray:
    """Clamp to y >= 0 coordinatewise."""
    return np.maximum(v, 0.0)


@dataclass(frozen=True, eq=False)
class SaddleProblem:
    objective: np.ndarray
    matrix: SparseMatrix
    rhs: np.ndarray
    x_lower: np.ndarray
    x_upper: np.ndarray
    y_lower: np.ndarray
    y_upper: np.ndarray

    def __post_init__(self) -> None:
        n_rows, n_cols = self.matrix.shape
        for name, length in (("objective", n_cols), ("rhs", n_rows), ("x_lower", n_cols),
                             ("x_upper", n_cols), ("y_lower", n_rows), ("y_upper", n_rows)):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (length,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({length},)")
            object.__setattr__(self, name, arr)
        if np.any(self.x_lower > self.x_upper) or np.any(self.y_lower > self.y_upper):
            raise ValueError("empty box")

    @classmethod
    def from_lp(cls, lp: StandardLP) -> SaddleProblem:
        return cls(
            objective=lp.objective,
            matrix=lp.constraints,
            rhs=lp.rhs,
            x_lower=lp.var_lower,
            x_upper=lp.var_upper,
            y_lower=np.zeros(lp.n_rows),
            y_upper=np.full(lp.n_rows, np.inf),
        )

    @classmethod
    def of(cls, problem: SaddleProblem | StandardLP) -> SaddleProblem:
        return problem if isinstance(problem, SaddleProblem) else cls.from_lp(problem)

    @property
    def n_primal(self) -> int:
        return self.matrix.n_cols

    @property
    def n_dual(self) -> int:
        return self.matrix.n_rows

    def project_x(self, v: np.ndarray) -> np.ndarray:
        return np.clip(v, self.x_lower, self.x_upper)

    def project_y(self, v: np.ndarray) -> np.ndarray:
        return np.clip(v, self.y_lower, self.y_upper)

    def lagrangian(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.objective @ x + y @ (self.matrix.matvec(x) - self.rhs))

    def rescaled(self, diagonals: RescalingDiagonals) -> SaddleProblem:
        """The same problem in scaled variables x̂ = x / D_c, ŷ = y / D_r."""
        row, col = diagonals.row_scale, diagonals.col_scale
        return SaddleProblem(
            objective=col * self.objective,
            matrix=self.matrix.scaled(row, col),
            rhs=row * self.rhs,
            x_lower=self.x_lower / col,
            x_upper=self.x_upper / col,
            y_lower=self.y_lower / row,
            y_upper=self.y_upper / row,
        )
