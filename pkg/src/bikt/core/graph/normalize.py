"""
Propagation operators built from a graph's adjacency.

Self-loops are added here and never stored on the graph.
"""

import numpy as np
import scipy.sparse as sp

from bikt.core.graph.models import Graph
from bikt.core.tensor.matrix import SparseCSR, csr_from_entries


def _with_self_loops(graph: Graph):
    n = graph.n
    coo = (graph.adj + sp.identity(n, format="csr")).tocoo()
    degree = np.asarray(coo.sum(axis=1)).ravel()
    return coo, degree


def normalize_gcn(graph: Graph) -> SparseCSR:
    """Symmetric normalization (D+I)^-1/2 (A+I) (D+I)^-1/2."""
    coo, degree = _with_self_loops(graph)
    inv_sqrt = 1.0 / np.sqrt(degree)
    values = inv_sqrt[coo.row] * inv_sqrt[coo.col]
    return csr_from_entries(coo.row, coo.col, values, (graph.n, graph.n))


def normalize_mean(graph: Graph) -> SparseCSR:
    """Row-stochastic mean over each node and its neighbors."""
    coo, degree = _with_self_loops(graph)
    values = 1.0 / degree[coo.row]
    return csr_from_entries(coo.row, coo.col, values, (graph.n, graph.n))


def identity_propagation(n: int) -> SparseCSR:
    if n < 1:
        raise ValueError(f"identity propagation needs n >= 1, got {n}")
    return sp.identity(n, dtype=np.float64, format="csr")
