"""
Shared fixtures for BiKT tests.
"""

import logging

import pytest

from bikt.core.graph.splits import make_splits
from bikt.core.graph.synthetic import synth_sbm
from bikt.core.models.layers import Architecture
from bikt.intelligence.training.config import EpochConfig, GeneratorConfig, TrainConfig


@pytest.fixture(autouse=True)
def propagate_bikt_logs():
    """Let caplog see package logs even after the CLI configured logging."""
    logger = logging.getLogger("bikt")
    previous = logger.propagate
    logger.propagate = True
    yield
    logger.propagate = previous


@pytest.fixture
def small_graph():
    """A 120-node, 3-class assortative SBM graph."""
    return synth_sbm(120, 3, 0.12, 0.01, feat_dim=8, feat_noise=0.5, seed=0)


@pytest.fixture
def small_masks(small_graph):
    return make_splits(small_graph, train_frac=0.1, val_frac=0.1, seed=0)


@pytest.fixture
def small_architecture():
    return Architecture(layers=2, hidden=8, dropout=0.5)


@pytest.fixture
def fast_cfg():
    """Short schedule suitable for unit tests."""
    return TrainConfig(
        alpha=1.0,
        beta=1.0,
        iterations=1,
        epochs=EpochConfig(base=6, gnn=4, mlp=4, gen=4),
        generator=GeneratorConfig(lr=1e-2, lambda_ms=1.0, samples=16),
        seed=3,
    )
