"""
Stochastic block model graphs with class-mean features.
"""

import logging

import networkx as nx
import numpy as np

from bikt.core.errors import BiktConfigurationError
from bikt.core.graph.models import Graph, build_graph

logger = logging.getLogger(__name__)


def balanced_sizes(n: int, num_classes: int) -> list:
    """Class sizes differing by at most one, larger classes first."""
    base, extra = divmod(n, num_classes)
    return [base + (1 if c < extra else 0) for c in range(num_classes)]


def expected_homophily(num_classes: int, intra_p: float, inter_p: float) -> float:
    """Expected neighbor-label agreement of a balanced SBM in the large-n limit."""
    denominator = intra_p + (num_classes - 1) * inter_p
    return intra_p / denominator if denominator > 0 else float("nan")


def synth_sbm(
    n: int,
    num_classes: int,
    intra_p: float,
    inter_p: float,
    feat_dim: int,
    feat_noise: float,
    seed: int = 0,
) -> Graph:
    """
    Sample a balanced stochastic block model graph.

    Class c has mean feature vector e_(c mod feat_dim); node features are the class
    mean plus Gaussian noise with standard deviation ``feat_noise``.

    Args:
        n: Number of nodes
        num_classes: Number of classes (blocks)
        intra_p: Edge probability inside a class
        inter_p: Edge probability across classes
        feat_dim: Feature dimension
        feat_noise: Standard deviation of the feature noise
        seed: Seed for edges and features

    Returns:
        Seed-deterministic graph
    """
    if num_classes < 2:
        raise BiktConfigurationError(f"num_classes must be >= 2, got {num_classes}")
    if n < num_classes:
        raise BiktConfigurationError(f"n ({n}) must be at least num_classes ({num_classes})")
    for name, p in (("intra_p", intra_p), ("inter_p", inter_p)):
        if not 0.0 <= p <= 1.0:
            raise BiktConfigurationError(f"{name} must be in [0, 1], got {p}")
    if feat_dim < 1 or feat_noise < 0:
        raise BiktConfigurationError("feat_dim must be >= 1 and feat_noise >= 0")

    sizes = balanced_sizes(n, num_classes)
    probabilities = [
        [intra_p if a == b else inter_p for b in range(num_classes)] for a in range(num_classes)
    ]
    sbm = nx.stochastic_block_model(sizes, probabilities, seed=seed, directed=False,
                                    selfloops=False, sparse=True)
    labels = np.array([sbm.nodes[v]["block"] for v in range(n)], dtype=np.int64)
    edges = np.array(list(sbm.edges()), dtype=np.int64).reshape(-1, 2)

    means = np.zeros((num_classes, feat_dim))
    means[np.arange(num_classes), np.arange(num_classes) % feat_dim] = 1.0
    rng = np.random.default_rng(seed)
    features = means[labels] + rng.normal(0.0, feat_noise, size=(n, feat_dim))

    graph = build_graph(n, edges, features, labels, num_classes)
    logger.info(
        f"Sampled SBM graph: {n} nodes, {graph.num_edges} edges, "
        f"{num_classes} classes (p_in={intra_p}, p_out={inter_p})"
    )
    return graph
