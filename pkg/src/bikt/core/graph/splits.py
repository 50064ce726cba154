"""
Train/validation/test splits for transductive and inductive protocols.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from bikt.core.errors import BiktConfigurationError, StratificationError
from bikt.core.graph.models import Graph, SplitMasks

logger = logging.getLogger(__name__)


def allocate_quotas(total: int, counts: NDArray, min_one: bool = False) -> NDArray[np.int64]:
    """
    Split ``total`` across classes proportionally to ``counts``.

    Largest remainders receive the leftover units, ties going to the lower class
    index. With ``min_one`` every class gets at least one unit when ``total`` allows,
    taken from the class holding the most units. No class gets more units than it
    has members: units beyond a class's size go to the class with the most room
    left, and a warning is logged when ``total`` exceeds all members.
    """
    counts = np.asarray(counts, dtype=np.int64)
    exact = total * counts / counts.sum()
    quotas = np.floor(exact).astype(np.int64)
    remainder = exact - quotas
    leftover = total - int(quotas.sum())
    order = np.lexsort((np.arange(len(counts)), -remainder))
    quotas[order[:leftover]] += 1

    if min_one and total >= len(counts):
        for cls in np.flatnonzero(quotas == 0):
            donor = int(np.argmax(quotas))
            quotas[donor] -= 1
            quotas[cls] += 1

    quotas = np.minimum(quotas, counts)
    for _ in range(min(total, int(counts.sum())) - int(quotas.sum())):
        quotas[int(np.argmax(counts - quotas))] += 1
    if total > counts.sum():
        logger.warning(f"Only {int(counts.sum())} of {total} requested units fit the classes")
    return quotas


def _split_sizes(n: int, train_frac: float, val_frac: float) -> Tuple[int, int]:
    if train_frac < 0 or val_frac < 0 or train_frac + val_frac >= 1:
        raise BiktConfigurationError(
            f"split fractions must be nonnegative with train + val < 1, "
            f"got {train_frac} + {val_frac}"
        )
    return int(round(train_frac * n)), int(round(val_frac * n))


def make_splits(
    graph: Graph,
    train_frac: float = 0.025,
    val_frac: float = 0.025,
    seed: int = 0,
    stratified: bool = True,
) -> SplitMasks:
    """
    Draw disjoint train/val/test masks; every node is observed.

    Args:
        graph: Graph to split
        train_frac: Fraction of nodes used for training
        val_frac: Fraction of nodes used for validation
        seed: Seed of the permutation
        stratified: Allocate train and val per class proportionally

    Returns:
        Seed-deterministic split masks

    Raises:
        StratificationError: If stratifying and some class has no nodes
    """
    n = graph.n
    n_train, n_val = _split_sizes(n, train_frac, val_frac)
    rng = np.random.default_rng(seed)

    if not stratified:
        order = rng.permutation(n)
        train, val, test = order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]
        return SplitMasks.from_indices(n, train, val, test)

    counts = np.bincount(graph.labels, minlength=graph.num_classes)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise StratificationError(f"classes {empty.tolist()} have no nodes")

    members = [rng.permutation(np.flatnonzero(graph.labels == c)) for c in range(graph.num_classes)]
    train_quota = allocate_quotas(n_train, counts, min_one=True)
    val_quota = allocate_quotas(n_val, counts - train_quota)

    train, val, test = [], [], []
    for nodes, t, v in zip(members, train_quota, val_quota):
        train.append(nodes[:t])
        val.append(nodes[t:t + v])
        test.append(nodes[t + v:])
    masks = SplitMasks.from_indices(n, np.concatenate(train), np.concatenate(val),
                                    np.concatenate(test))
    logger.debug(f"Stratified split train per class: {train_quota.tolist()}")
    return masks


def restrict_to_observed(graph: Graph, observed: NDArray[np.bool_]) -> Graph:
    """Copy of ``graph`` without any edge touching an unobserved node."""
    keep = sp.diags(observed.astype(np.float64))
    adj = (keep @ graph.adj @ keep).tocsr()
    adj.eliminate_zeros()
    adj.sort_indices()
    return Graph(adj=adj, features=graph.features, labels=graph.labels,
                 num_classes=graph.num_classes)


def make_inductive(
    graph: Graph,
    masks: SplitMasks,
    holdout_frac: float = 0.2,
    seed: int = 0,
) -> Tuple[Graph, SplitMasks]:
    """
    Hide a random share of test nodes from training.

    Hidden nodes keep their features but lose every incident edge in the returned
    training graph. Evaluation should use the original graph.
    """
    if not 0.0 <= holdout_frac < 1.0:
        raise BiktConfigurationError(f"holdout_frac must be in [0, 1), got {holdout_frac}")
    if holdout_frac == 0.0:
        return graph, masks

    test = masks.indices("test")
    count = int(round(holdout_frac * test.size))
    rng = np.random.default_rng(seed)
    hidden = np.sort(rng.choice(test, size=count, replace=False))
    observed = masks.observed.copy()
    observed[hidden] = False
    inductive = SplitMasks(train=masks.train, val=masks.val, test=masks.test, observed=observed)
    logger.info(f"Inductive split hides {count} of {test.size} test nodes")
    return restrict_to_observed(graph, observed), inductive


def resolve_split_seed(split_seed: Optional[int], run_seed: int) -> int:
    return run_seed if split_seed is None else split_seed
