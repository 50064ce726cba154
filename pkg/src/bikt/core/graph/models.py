"""
Graph data model: the graph itself, split masks and homophily reports.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from bikt.core.errors import ConsistencyError, DimensionError, LabelRangeError, NodeRangeError
from bikt.core.tensor.matrix import Matrix, SparseCSR, as_matrix

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected, unweighted node-classification graph.

    The adjacency is symmetric with unit entries and no stored self-loops.
    """

    adj: SparseCSR
    features: Matrix
    labels: NDArray[np.int64]
    num_classes: int

    def __post_init__(self):
        n = self.adj.shape[0]
        if self.adj.shape != (n, n):
            raise DimensionError(f"adjacency must be square, got {self.adj.shape}")
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise ConsistencyError(
                f"features have {self.features.shape[0]} rows but the graph has {n} nodes"
            )
        if self.labels.shape != (n,):
            raise ConsistencyError(f"expected {n} labels, got {self.labels.shape[0]}")
        if n and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise LabelRangeError(f"labels must lie in [0, {self.num_classes})")
        if (self.adj != self.adj.T).nnz:
            raise ConsistencyError("adjacency is not symmetric")
        if self.adj.diagonal().any():
            raise ConsistencyError("adjacency stores self-loops")

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.adj.nnz // 2

    def degrees(self) -> NDArray[np.int64]:
        return np.diff(self.adj.indptr)

    def neighbors(self, node: int) -> NDArray[np.int32]:
        return self.adj.indices[self.adj.indptr[node]:self.adj.indptr[node + 1]]

    def edge_pairs(self) -> NDArray[np.int64]:
        """Each undirected edge once as ``(u, v)`` with ``u < v``, sorted."""
        coo = sp.triu(self.adj, k=1).tocoo()
        pairs = np.stack([coo.row, coo.col], axis=1).astype(np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]


def build_graph(
    n: int,
    edges: NDArray,
    features,
    labels,
    num_classes: Optional[int] = None,
) -> Graph:
    """
    Assemble a canonical graph from an edge array of shape (m, 2).

    Edges are symmetrized and deduplicated; self-loops are dropped.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise NodeRangeError(f"edge endpoint outside [0, {n})")
    edges = edges[edges[:, 0] != edges[:, 1]]
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    adj = sp.coo_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(n, n)).tocsr()
    adj.sum_duplicates()
    adj.data[:] = 1.0
    adj.sort_indices()

    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 0
    return Graph(adj=adj, features=as_matrix(features, "features"), labels=labels,
                 num_classes=num_classes)


@dataclass(frozen=True, eq=False)
class SplitMasks:
    """Disjoint train/val/test masks plus inductive visibility."""

    train: NDArray[np.bool_]
    val: NDArray[np.bool_]
    test: NDArray[np.bool_]
    observed: NDArray[np.bool_]

    def __post_init__(self):
        n = self.train.shape[0]
        for name in ("val", "test", "observed"):
            if getattr(self, name).shape != (n,):
                raise ConsistencyError(f"mask '{name}' does not have length {n}")
        if (self.train & self.val).any() or (self.train & self.test).any() or (
            self.val & self.test
        ).any():
            raise ConsistencyError("train, val and test masks overlap")
        if ((self.train | self.val) & ~self.observed).any():
            raise ConsistencyError("train and val nodes must be observed")

    @property
    def n(self) -> int:
        return self.train.shape[0]

    def indices(self, name: str) -> NDArray[np.int64]:
        """Sorted node ids of a split (``train``, ``val``, ``test``, ``observed``)."""
        return np.flatnonzero(getattr(self, name))

    def unobserved(self) -> NDArray[np.int64]:
        return np.flatnonzero(~self.observed)

    @classmethod
    def from_indices(
        cls,
        n: int,
        train,
        val,
        test,
        unobserved=(),
    ) -> "SplitMasks":
        masks = {}
        for name, ids in (("train", train), ("val", val), ("test", test)):
            ids = np.asarray(ids, dtype=np.int64)
            if ids.size and (ids.min() < 0 or ids.max() >= n):
                raise NodeRangeError(f"{name} split has ids outside [0, {n})")
            mask = np.zeros(n, dtype=bool)
            mask[ids] = True
            masks[name] = mask
        observed = np.ones(n, dtype=bool)
        hidden = np.asarray(unobserved, dtype=np.int64)
        if hidden.size and (hidden.min() < 0 or hidden.max() >= n):
            raise NodeRangeError(f"unobserved ids outside [0, {n})")
        observed[hidden] = False
        return cls(observed=observed, **masks)

    def to_json_dict(self) -> Dict[str, List[int]]:
        return {
            "train": self.indices("train").tolist(),
            "val": self.indices("val").tolist(),
            "test": self.indices("test").tolist(),
            "unobserved": self.unobserved().tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: Dict[str, List[int]], n: int) -> "SplitMasks":
        missing = [key for key in SPLIT_NAMES if key not in data]
        if missing:
            raise ConsistencyError(f"splits are missing keys: {', '.join(missing)}")
        return cls.from_indices(
            n, data["train"], data["val"], data["test"], data.get("unobserved", [])
        )


@dataclass(frozen=True, eq=False)
class HomophilyReport:
    """
    Per-node homophily ratios and the strict 0.2 / 0.8 partition.

    Isolated nodes have ratio NaN and belong to no subset.
    """

    ratios: NDArray[np.float64]
    assortative: NDArray[np.int64]
    disassortative: NDArray[np.int64]
    middle: NDArray[np.int64]

    @property
    def isolated(self) -> NDArray[np.int64]:
        return np.flatnonzero(np.isnan(self.ratios))

    def mean_ratio(self) -> float:
        """Mean homophily over non-isolated nodes."""
        defined = self.ratios[~np.isnan(self.ratios)]
        return float(defined.mean()) if defined.size else float("nan")
