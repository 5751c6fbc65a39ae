"""Spectral-norm estimation and Ruiz equilibration."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .matrix import SparseMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RescalingDiagonals:
    """Diagonal scalings D_r, D_c of a rescaled matrix D_r · A · D_c.

    A problem ``min p·x s.t. Ax <= h, l <= x <= u`` maps to the scaled problem
    with p~ = D_c p, h~ = D_r h, bounds l / D_c, u / D_c. Solutions map back
    with x = D_c x~ and y = D_r y~.
    """

    row_scale: np.ndarray
    col_scale: np.ndarray

    def __post_init__(self) -> None:
        for name in ("row_scale", "col_scale"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValueError(f"{name} must be a 1-D array of positive finite entries")
            object.__setattr__(self, name, arr)

    @classmethod
    def identity(cls, n_rows: int, n_cols: int) -> RescalingDiagonals:
        return cls(np.ones(n_rows), np.ones(n_cols))

    def unscale_primal(self, x_scaled: np.ndarray) -> np.ndarray:
        return self.col_scale * x_scaled

    def unscale_dual(self, y_scaled: np.ndarray) -> np.ndarray:
        return self.row_scale * y_scaled

    def scale_primal(self, x: np.ndarray) -> np.ndarray:
        return x / self.col_scale

    def scale_dual(self, y: np.ndarray) -> np.ndarray:
        return y / self.row_scale


def spectral_norm_estimate(A: SparseMatrix, iterations: int = 100, seed: int = 0) -> float:
    """Estimate the largest singular value of A by power iteration on A^T A.

    The estimate is deterministic for a fixed seed. It is a lower estimate
    in exact arithmetic, so step-size callers apply a safety factor.

    Args:
        A: The matrix.
        iterations: Number of power steps (>= 1).
        seed: Seed of the random start vector.

    Returns:
        The estimate, or 0.0 for an all-zero matrix.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if A.nnz == 0:
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.n_cols)
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        w = A.rmatvec(A.matvec(v))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # Start vector landed in the null space; reseed deterministically.
            v = rng.standard_normal(A.n_cols)
            v /= np.linalg.norm(v)
            continue
        v = w / norm
    return float(np.linalg.norm(A.matvec(v)))


def ruiz_rescale(A: SparseMatrix, iterations: int = 10) -> tuple[SparseMatrix, RescalingDiagonals]:
    """Iterated l-infinity equilibration of rows and columns.

    Each pass divides every row and column by the square root of its current
    max-abs entry. Empty rows and columns keep scale 1.

    Args:
        A: The matrix to equilibrate.
        iterations: Number of passes; 0 returns A with unit scales.

    Returns:
        (D_r · A · D_c, RescalingDiagonals(D_r, D_c)).
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")

    row_scale = np.ones(A.n_rows)
    col_scale = np.ones(A.n_cols)
    scaled = A
    for _ in range(iterations):
        row_max = scaled.row_abs_max()
        col_max = scaled.col_abs_max()
        r = np.where(row_max > 0, 1.0 / np.sqrt(np.where(row_max > 0, row_max, 1.0)), 1.0)
        c = np.where(col_max > 0, 1.0 / np.sqrt(np.where(col_max > 0, col_max, 1.0)), 1.0)
        scaled = scaled.scaled(r, c)
        row_scale *= r
        col_scale *= c

    logger.debug("ruiz: %d passes, row scale range [%g, %g]", iterations,
                 row_scale.min(initial=1.0), row_scale.max(initial=1.0))
    return scaled, RescalingDiagonals(row_scale, col_scale)
