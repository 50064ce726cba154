"""
Maximum mean discrepancy with a Gaussian kernel.
"""

import math
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from bikt.core.errors import DimensionError, SampleSizeError
from bikt.core.tensor.matrix import Matrix


def median_bandwidth(a: Matrix, b: Matrix) -> float:
    """Median off-diagonal squared distance of the pooled sample."""
    pooled = np.vstack([a, b])
    distances = cdist(pooled, pooled, "sqeuclidean")
    off_diagonal = distances[~np.eye(len(pooled), dtype=bool)]
    median = float(np.median(off_diagonal))
    return median if median > 0 else 1.0


def _kernel_sum(x: Matrix, y: Matrix, bandwidth: float, drop_diagonal: bool) -> float:
    kernel = np.exp(-cdist(x, y, "sqeuclidean") / (2.0 * bandwidth))
    if drop_diagonal:
        kernel = kernel[~np.eye(len(x), dtype=bool)]
    return math.fsum(kernel.ravel())


def mmd_rbf(a: Matrix, b: Matrix, bandwidth: Union[str, float] = "auto") -> float:
    """
    Unbiased squared MMD between two samples.

    Kernel exp(-|x - y|^2 / (2 * bandwidth)). With ``bandwidth="auto"`` the median
    heuristic is used. For equally sized samples the one-sample U-statistic over
    paired rows is used, so identical inputs give exactly zero.

    Raises:
        SampleSizeError: If either sample has fewer than two rows
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionError(f"samples must share a column count, got {a.shape} and {b.shape}")
    m, n = len(a), len(b)
    if m < 2 or n < 2:
        raise SampleSizeError(f"need at least 2 rows per sample, got {m} and {n}")
    width = median_bandwidth(a, b) if bandwidth == "auto" else float(bandwidth)
    if width <= 0:
        raise ValueError(f"bandwidth must be positive, got {width}")

    if m == n:
        k_aa, k_bb, k_ab = (
            np.exp(-cdist(x, y, "sqeuclidean") / (2.0 * width)) for x, y in ((a, a), (b, b), (a, b))
        )
        h = (k_aa + k_bb) - (k_ab + k_ab.T)
        off_diagonal = h[~np.eye(m, dtype=bool)]
        return math.fsum(off_diagonal.ravel()) / (m * (m - 1))

    within_a = _kernel_sum(a, a, width, True) / (m * (m - 1))
    within_b = _kernel_sum(b, b, width, True) / (n * (n - 1))
    across = _kernel_sum(a, b, width, False) / (m * n)
    return within_a + within_b - 2.0 * across
