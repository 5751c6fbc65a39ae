"""Compressed-sparse-row matrix storage and matrix-vector kernels.

The matrix keeps its three CSR arrays immutable and exposes two products:
``spmv`` (A x) and ``spmv_transpose`` (A^T y). The transpose product walks the
same row storage through scipy's CSC view, so no transposed copy is stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator

import numpy as np
from scipy import sparse as sp


class SparseFormatError(ValueError):
    """Raised when sparse data violates the CSR invariants."""

    pass


class DimensionMismatchError(SparseFormatError):
    """Raised when a vector does not conform to a matrix dimension."""

    pass


class NonFiniteError(SparseFormatError):
    """Raised when NaN or Inf reaches a public boundary."""

    pass


def dense_vector(values: Any, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate and return a finite 1-D float64 array.

    Args:
        values: Anything ``np.asarray`` accepts.
        length: Required length, or None to accept any.
        name: Used in error messages.

    Returns:
        A float64 array (a copy only when a conversion was needed).

    Raises:
        DimensionMismatchError: If the array is not 1-D or has the wrong length.
        NonFiniteError: If any entry is NaN or infinite.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatchError(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable CSR matrix.

    Attributes:
        n_rows: Number of rows.
        n_cols: Number of columns.
        row_offsets: Length n_rows+1, nondecreasing, ends at nnz.
        col_indices: Column of each stored entry, strictly increasing within a row.
        values: Stored entries; never exactly zero.
    """

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _csr: sp.csr_array = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_rows < 0 or self.n_cols < 0:
            raise SparseFormatError(f"negative shape ({self.n_rows}, {self.n_cols})")

        offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        cols = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)

        if offsets.shape != (self.n_rows + 1,):
            raise SparseFormatError(
                f"row_offsets has length {offsets.shape[0]}, expected {self.n_rows + 1}"
            )
        nnz = cols.shape[0]
        if vals.shape[0] != nnz:
            raise SparseFormatError("col_indices and values differ in length")
        if offsets[0] != 0 or offsets[-1] != nnz or np.any(np.diff(offsets) < 0):
            raise SparseFormatError("row_offsets must start at 0, be nondecreasing and end at nnz")
        if nnz:
            if cols.min() < 0 or cols.max() >= self.n_cols:
                raise SparseFormatError("column index out of range")
            row_of = np.repeat(np.arange(self.n_rows), np.diff(offsets))
            same_row = row_of[1:] == row_of[:-1]
            if np.any(np.diff(cols)[same_row] <= 0):
                raise SparseFormatError("column indices must strictly increase within a row")
            if np.any(vals == 0.0):
                raise SparseFormatError("explicit zeros are not stored")
            if not np.all(np.isfinite(vals)):
                raise NonFiniteError("matrix values contain non-finite entries")

        for arr in (offsets, cols, vals):
            arr.flags.writeable = False
        object.__setattr__(self, "row_offsets", offsets)
        object.__setattr__(self, "col_indices", cols)
        object.__setattr__(self, "values", vals)
        object.__setattr__(
            self,
            "_csr",
            sp.csr_array((vals, cols, offsets), shape=(self.n_rows, self.n_cols)),
        )

    @property
    def nnz(self) -> int:
        """Number of stored nonzeros."""
        return int(self.values.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @cached_property
    def row_of_entry(self) -> np.ndarray:
        """Row index of every stored entry (expanded row_offsets)."""
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.row_offsets))

    # Hot-path kernels: no validation, callers guarantee conforming float64 input.
    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._csr @ x

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return self._csr.T @ y

    def row_abs_max(self) -> np.ndarray:
        """Max |a_ij| per row, 0 for empty rows."""
        out = np.zeros(self.n_rows)
        counts = np.diff(self.row_offsets)
        nonempty = counts > 0
        if self.nnz:
            starts = self.row_offsets[:-1][nonempty]
            out[nonempty] = np.maximum.reduceat(np.abs(self.values), starts)
        return out

    def col_abs_max(self) -> np.ndarray:
        """Max |a_ij| per column, 0 for empty columns."""
        out = np.zeros(self.n_cols)
        np.maximum.at(out, self.col_indices, np.abs(self.values))
        return out

    def row_support(self) -> np.ndarray:
        """Number of stored entries per row."""
        return np.diff(self.row_offsets)

    def scaled(self, row_scale: np.ndarray, col_scale: np.ndarray) -> SparseMatrix:
        """Return diag(row_scale) · A · diag(col_scale) with the same sparsity."""
        vals = self.values * row_scale[self.row_of_entry] * col_scale[self.col_indices]
        return SparseMatrix(self.n_rows, self.n_cols, self.row_offsets, self.col_indices, vals)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        out[self.row_of_entry, self.col_indices] = self.values
        return out

    def iter_triplets(self) -> Iterator[tuple[int, int, float]]:
        """Yield (row, col, value) in row-major order."""
        for r, c, v in zip(self.row_of_entry, self.col_indices, self.values):
            yield int(r), int(c), float(v)

    def to_dict(self) -> dict[str, Any]:
        """Triplet JSON form ``{"n_rows", "n_cols", "entries"}``."""
        return {
            "n_rows": self.n_rows,
            "n_cols": self.n_cols,
            "entries": [[r, c, v] for r, c, v in self.iter_triplets()],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SparseMatrix:
        """Create from the triplet JSON form."""
        try:
            n_rows = int(data["n_rows"])
            n_cols = int(data["n_cols"])
            entries = data.get("entries", [])
        except (KeyError, TypeError, ValueError) as e:
            raise SparseFormatError(f"invalid triplet JSON: {e}") from e
        return csr_from_triplets(n_rows, n_cols, [tuple(e) for e in entries])

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), idx, np.ones(n))

    @classmethod
    def diagonal(cls, diag: Iterable[float]) -> SparseMatrix:
        d = np.asarray(list(diag), dtype=np.float64)
        n = d.shape[0]
        idx = np.arange(n, dtype=np.int64)
        return csr_from_arrays(n, n, idx, idx, d)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> SparseMatrix:
        dense = np.asarray(dense, dtype=np.float64)
        rows, cols = np.nonzero(dense)
        return csr_from_arrays(dense.shape[0], dense.shape[1], rows, cols, dense[rows, cols])


def csr_from_arrays(
    n_rows: int,
    n_cols: int,
    rows: np.ndarray,
    cols: np.ndarray,
    vals: np.ndarray,
) -> SparseMatrix:
    """Build a CSR matrix from parallel coordinate arrays.

    Duplicate (row, col) pairs are summed and resulting zeros are dropped.

    Raises:
        SparseFormatError: On the first out-of-range coordinate, naming it.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
        raise SparseFormatError("rows, cols and vals must be 1-D arrays of equal length")

    bad = (rows < 0) | (rows >= n_rows) | (cols < 0) | (cols >= n_cols)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise SparseFormatError(
            f"triplet {k} ({int(rows[k])}, {int(cols[k])}, {float(vals[k])}) "
            f"out of range for shape ({n_rows}, {n_cols})"
        )
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("triplet values contain non-finite entries")

    if rows.size:
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        first = np.ones(rows.size, dtype=bool)
        first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(first)
        vals = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
        keep = vals != 0.0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]

    offsets = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=offsets[1:])
    return SparseMatrix(n_rows, n_cols, offsets, cols, vals)


def csr_from_triplets(
    n_rows: int,
    n_cols: int,
    triplets: Iterable[tuple[int, int, float]],
) -> SparseMatrix:
    """Build a CSR matrix from (row, col, value) triplets.

    Args:
        n_rows: Number of rows.
        n_cols: Number of columns.
        triplets: Coordinates and values; duplicates are summed.

    Returns:
        A SparseMatrix with sorted columns and no stored zeros.

    Raises:
        SparseFormatError: If an index is out of range (the message names the triplet).
    """
    items = list(triplets)
    if not items:
        empty = np.zeros(0)
        return csr_from_arrays(n_rows, n_cols, empty, empty, empty)
    try:
        rows, cols, vals = zip(*items)
    except ValueError as e:
        raise SparseFormatError(f"triplets must be (row, col, value): {e}") from e
    for k, (r, c) in enumerate(zip(rows, cols)):
        if int(r) != r or int(c) != c:
            raise SparseFormatError(f"triplet {k} {items[k]!r} has a non-integer index")
    return csr_from_arrays(n_rows, n_cols, np.array(rows), np.array(cols), np.array(vals))


def spmv(A: SparseMatrix, x: Any) -> np.ndarray:
    """Compute A x.

    Raises:
        DimensionMismatchError: If len(x) != A.n_cols.
        NonFiniteError: If x has NaN/Inf entries.
    """
    return A.matvec(dense_vector(x, A.n_cols, "x"))


def spmv_transpose(A: SparseMatrix, y: Any) -> np.ndarray:
    """Compute A^T y without materializing the transpose.

    Raises:
        DimensionMismatchError: If len(y) != A.n_rows.
        NonFiniteError: If y has NaN/Inf entries.
    """
    return A.rmatvec(dense_vector(y, A.n_rows, "y"))
