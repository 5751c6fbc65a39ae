"""Sparse matrix storage, kernels and rescaling."""

from .matrix import (
    DimensionMismatchError,
    NonFiniteError,
    SparseFormatError,
    SparseMatrix,
    csr_from_arrays,
    csr_from_triplets,
    dense_vector,
    spmv,
    spmv_transpose,
)
from .scaling import RescalingDiagonals, ruiz_rescale, spectral_norm_estimate

__all__ = [
    "DimensionMismatchError",
    "NonFiniteError",
    "RescalingDiagonals",
    "SparseFormatError",
    "SparseMatrix",
    "csr_from_arrays",
    "csr_from_triplets",
    "dense_vector",
    "ruiz_rescale",
    "spectral_norm_estimate",
    "spmv",
    "spmv_transpose",
]
