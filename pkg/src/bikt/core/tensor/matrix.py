"""
Dense and sparse value types shared by every model in the package.
"""

from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from bikt.core.errors import DimensionError

Matrix = NDArray[np.float64]
SparseCSR = sp.csr_matrix


def as_matrix(values: Any, name: str = "matrix") -> Matrix:
    """
    Coerce ``values`` into a 2-D float64 array.

    Args:
        values: Anything ``numpy.asarray`` understands
        name: Name used in error messages

    Returns:
        A C-contiguous float64 array

    Raises:
        DimensionError: If the input is not two-dimensional
    """
    array = np.ascontiguousarray(values, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {array.shape}")
    return array


def is_finite(matrix: Matrix) -> bool:
    return bool(np.isfinite(matrix).all())


def csr_from_entries(
    rows: Sequence[int], cols: Sequence[int], values: Sequence[float], shape: tuple
) -> SparseCSR:
    """Build a canonical CSR matrix (duplicates summed, columns sorted)."""
    matrix = sp.coo_matrix(
        (np.asarray(values, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
        shape=shape,
    ).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def check_csr(matrix: SparseCSR) -> None:
    """
    Verify the structural invariants of a CSR matrix.

    Raises:
        DimensionError: If offsets or column indices are malformed
    """
    rows, cols = matrix.shape
    indptr = matrix.indptr
    if len(indptr) != rows + 1 or indptr[0] != 0 or indptr[-1] != matrix.nnz:
        raise DimensionError("row offsets do not describe the stored entries")
    if np.any(np.diff(indptr) < 0):
        raise DimensionError("row offsets must be nondecreasing")
    if matrix.nnz and (matrix.indices.min() < 0 or matrix.indices.max() >= cols):
        raise DimensionError(f"column index out of range for {cols} columns")
    for row in range(rows):
        segment = matrix.indices[indptr[row]:indptr[row + 1]]
        if np.any(np.diff(segment) <= 0):
            raise DimensionError(f"row {row} has unsorted or repeated column indices")
