"""
Unit tests for graph loading, normalization, splits, homophily and SBM sampling.
"""

import logging

import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from bikt.core.errors import (
    BiktConfigurationError,
    ConsistencyError,
    GraphParseError,
    NodeRangeError,
    StratificationError,
)
from bikt.core.graph import (
    Graph,
    SplitMasks,
    build_graph,
    homophily,
    identity_propagation,
    load_graph,
    load_graph_dir,
    load_splits,
    make_inductive,
    make_splits,
    normalize_gcn,
    normalize_mean,
    save_graph,
    save_splits,
    synth_sbm,
)
from bikt.core.graph.splits import allocate_quotas, resolve_split_seed
from bikt.core.graph.synthetic import balanced_sizes, expected_homophily
from bikt.core.tensor import spmm


def write_dataset(directory, edges, features, labels):
    (directory / "edges.txt").write_text(edges)
    (directory / "features.csv").write_text(features)
    (directory / "labels.csv").write_text(labels)
    return directory / "edges.txt", directory / "features.csv", directory / "labels.csv"


def labeled_graph(labels, edges=()):
    labels = np.asarray(labels)
    return build_graph(len(labels), np.array(edges).reshape(-1, 2),
                       np.zeros((len(labels), 1)), labels)


def test_load_graph_single_edge(tmp_path):
    """Test a one-edge file yields a symmetric two-entry adjacency."""
    paths = write_dataset(tmp_path, "0\t1\n", "1.0,2.0\n3.0,4.0\n", "0\n1\n")
    graph = load_graph(*paths)
    assert graph.n == 2
    assert graph.adj.nnz == 2
    assert graph.adj[0, 1] == 1.0 and graph.adj[1, 0] == 1.0
    assert np.array_equal(graph.features, [[1.0, 2.0], [3.0, 4.0]])
    assert graph.num_classes == 2


def test_load_graph_merges_duplicates(tmp_path):
    """Test both orientations of an edge collapse to one undirected edge."""
    paths = write_dataset(tmp_path, "# comment\n0 1\n1 0\n\n", "0\n0\n", "0\n0\n")
    graph = load_graph(*paths)
    assert graph.adj.nnz == 2
    assert graph.num_edges == 1


def test_load_graph_drops_self_loops_with_warning(tmp_path, caplog):
    """Test self-loops are removed and reported."""
    paths = write_dataset(tmp_path, "3 3\n0 1\n", "0\n0\n0\n0\n", "0\n1\n0\n1\n")
    with caplog.at_level(logging.WARNING, logger="bikt"):
        graph = load_graph(*paths)
    assert graph.adj.diagonal().sum() == 0
    assert graph.adj.nnz == 2
    assert "self-loop" in caplog.text


def test_load_graph_rejects_node_out_of_range(tmp_path):
    paths = write_dataset(tmp_path, "0 5\n", "0\n0\n", "0\n1\n")
    with pytest.raises(NodeRangeError):
        load_graph(*paths)


def test_load_graph_reports_malformed_line(tmp_path):
    """Test parse errors carry the offending line number."""
    paths = write_dataset(tmp_path, "0 1\n1 2 3\n", "0\n0\n0\n", "0\n1\n0\n")
    with pytest.raises(GraphParseError) as excinfo:
        load_graph(*paths)
    assert excinfo.value.line_number == 2
    assert "line 2" in str(excinfo.value)

    paths = write_dataset(tmp_path, "a b\n", "0\n0\n", "0\n1\n")
    with pytest.raises(GraphParseError):
        load_graph(*paths)


def test_load_graph_rejects_row_count_mismatch(tmp_path):
    paths = write_dataset(tmp_path, "0 1\n", "0\n0\n0\n", "0\n1\n")
    with pytest.raises(ConsistencyError):
        load_graph(*paths)


def test_save_graph_round_trip(tmp_path):
    """Test a saved dataset directory loads back bit-identically."""
    graph = synth_sbm(60, 3, 0.2, 0.02, feat_dim=4, feat_noise=0.7, seed=5)
    save_graph(graph, tmp_path / "data")
    loaded = load_graph_dir(tmp_path / "data")
    assert (loaded.adj != graph.adj).nnz == 0
    assert np.array_equal(loaded.features, graph.features)
    assert np.array_equal(loaded.labels, graph.labels)


def test_graph_rejects_asymmetric_adjacency():
    adj = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ConsistencyError):
        Graph(adj=adj, features=np.zeros((2, 1)), labels=np.array([0, 1]), num_classes=2)


def test_normalize_gcn_examples():
    """Test normalization of an isolated node and a single edge."""
    single = labeled_graph([0])
    assert normalize_gcn(single).toarray().tolist() == [[1.0]]

    pair = labeled_graph([0, 1], [(0, 1)])
    assert np.allclose(normalize_gcn(pair).toarray(), np.full((2, 2), 0.5), atol=1e-15)


def test_normalize_gcn_matches_dense_oracle():
    """Test sparse normalization against a dense computation on random small graphs."""
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        dense = np.triu((rng.random((n, n)) < 0.4).astype(float), k=1)
        dense = dense + dense.T
        edges = np.argwhere(np.triu(dense, k=1))
        graph = labeled_graph(np.zeros(n, dtype=int), edges)

        with_loops = dense + np.eye(n)
        inv_sqrt = np.diag(1.0 / np.sqrt(with_loops.sum(axis=1)))
        expected = inv_sqrt @ with_loops @ inv_sqrt

        operator = normalize_gcn(graph)
        assert np.max(np.abs(operator.toarray() - expected)) <= 1e-12
        assert np.max(np.abs(operator.toarray() - operator.toarray().T)) <= 1e-15
        assert np.all(operator.diagonal() > 0)


def test_normalize_mean_is_row_stochastic():
    """Test mean aggregation weights on a star and row sums on random graphs."""
    star = labeled_graph([0, 0, 0, 0], [(0, 1), (0, 2), (0, 3)])
    assert np.array_equal(normalize_mean(star).toarray()[0], [0.25, 0.25, 0.25, 0.25])

    graph = synth_sbm(80, 4, 0.2, 0.05, feat_dim=2, feat_noise=1.0, seed=2)
    sums = np.asarray(normalize_mean(graph).sum(axis=1)).ravel()
    assert np.all(np.abs(sums - 1.0) <= 1e-12)


def test_identity_propagation():
    """Test the identity operator leaves features untouched."""
    operator = identity_propagation(5)
    assert operator.nnz == 5
    features = np.random.default_rng(1).normal(size=(5, 3))
    assert np.array_equal(spmm(operator, features), features)
    with pytest.raises(ValueError):
        identity_propagation(0)


def test_allocate_quotas_largest_remainder():
    """Test leftover units go to the largest remainders, ties to lower classes."""
    assert allocate_quotas(25, np.array([250, 250, 250, 250])).tolist() == [7, 6, 6, 6]
    assert allocate_quotas(10, np.array([1, 1, 1])).tolist() == [1, 1, 1]
    assert allocate_quotas(3, np.array([90, 5, 5]), min_one=True).tolist() == [1, 1, 1]


def test_allocate_quotas_never_drops_units_that_fit(caplog):
    """Test units over a class's size move to a class with room, and overflow is reported."""
    quotas = allocate_quotas(3, np.array([5, 5, 0]), min_one=True)
    assert quotas.tolist() == [2, 1, 0]
    assert "requested units" not in caplog.text
    assert allocate_quotas(10, np.array([1, 1, 1])).sum() == 3
    assert "Only 3 of 10 requested units" in caplog.text


def test_make_splits_sizes_and_disjointness():
    """Test 1000 nodes at 2.5% / 2.5% give 25 / 25 / 950 disjoint nodes."""
    graph = labeled_graph(np.arange(1000) % 4)
    masks = make_splits(graph, 0.025, 0.025, seed=0)
    assert (masks.train.sum(), masks.val.sum(), masks.test.sum()) == (25, 25, 950)
    assert not (masks.train & masks.val).any()
    assert not (masks.train & masks.test).any()
    assert (masks.train | masks.val | masks.test).all()
    assert masks.observed.all()


def test_make_splits_stratified_counts():
    """Test each of four balanced classes gets 6 or 7 training nodes."""
    graph = labeled_graph(np.arange(1000) % 4)
    masks = make_splits(graph, 0.025, 0.025, seed=3)
    per_class = np.bincount(graph.labels[masks.train], minlength=4)
    assert set(per_class.tolist()) <= {6, 7}
    assert per_class.sum() == 25


def test_make_splits_deterministic_and_seed_sensitive():
    graph = labeled_graph(np.arange(200) % 2)
    first = make_splits(graph, 0.1, 0.1, seed=4)
    second = make_splits(graph, 0.1, 0.1, seed=4)
    other = make_splits(graph, 0.1, 0.1, seed=5)
    assert np.array_equal(first.train, second.train)
    assert np.array_equal(first.val, second.val)
    assert not np.array_equal(first.train, other.train)


def test_make_splits_unstratified():
    graph = labeled_graph(np.arange(100) % 2)
    masks = make_splits(graph, 0.2, 0.3, seed=0, stratified=False)
    assert (masks.train.sum(), masks.val.sum(), masks.test.sum()) == (20, 30, 50)


def test_make_splits_errors():
    """Test empty classes and bad fractions are rejected."""
    graph = build_graph(4, np.zeros((0, 2)), np.zeros((4, 1)), [0, 1, 0, 1], num_classes=3)
    with pytest.raises(StratificationError):
        make_splits(graph, 0.25, 0.25)
    with pytest.raises(BiktConfigurationError):
        make_splits(labeled_graph([0, 1]), 0.6, 0.5)


def test_make_inductive_hides_test_nodes():
    """Test 20% of 950 test nodes are hidden and lose their edges."""
    graph = synth_sbm(1000, 4, 0.02, 0.004, feat_dim=4, feat_noise=1.0, seed=1)
    masks = make_splits(graph, 0.025, 0.025, seed=1)
    train_graph, inductive = make_inductive(graph, masks, 0.2, seed=1)

    hidden = inductive.unobserved()
    assert hidden.size == 190
    assert np.all(masks.test[hidden])
    assert not (inductive.train & ~inductive.observed).any()
    assert train_graph.degrees()[hidden].sum() == 0
    coo = train_graph.adj.tocoo()
    assert inductive.observed[coo.row].all() and inductive.observed[coo.col].all()
    assert np.array_equal(train_graph.features, graph.features)


def test_make_inductive_zero_holdout_is_identity():
    graph = labeled_graph(np.arange(40) % 2, [(0, 1), (2, 3)])
    masks = make_splits(graph, 0.25, 0.25, seed=0)
    same_graph, same_masks = make_inductive(graph, masks, 0.0)
    assert same_graph is graph and same_masks is masks


def test_split_masks_round_trip(tmp_path):
    """Test split files preserve every mask including the unobserved set."""
    masks = SplitMasks.from_indices(6, [0, 1], [2], [3, 4, 5], unobserved=[5])
    save_splits(masks, tmp_path / "splits.json")
    loaded = load_splits(tmp_path / "splits.json", 6)
    for name in ("train", "val", "test", "observed"):
        assert np.array_equal(getattr(loaded, name), getattr(masks, name))


def test_split_masks_validation():
    with pytest.raises(ConsistencyError):
        SplitMasks.from_indices(4, [0, 1], [1], [2, 3])
    with pytest.raises(ConsistencyError):
        SplitMasks.from_indices(4, [0], [1], [2, 3], unobserved=[0])
    with pytest.raises(NodeRangeError):
        SplitMasks.from_indices(4, [0], [1], [7])


def test_resolve_split_seed():
    assert resolve_split_seed(None, 7) == 7
    assert resolve_split_seed(3, 7) == 3


def test_homophily_examples():
    """Test a same-label triangle, a mixed star and an isolated node."""
    triangle = labeled_graph([1, 1, 1], [(0, 1), (1, 2), (0, 2)])
    report = homophily(triangle)
    assert report.ratios.tolist() == [1.0, 1.0, 1.0]
    assert report.assortative.tolist() == [0, 1, 2]

    star = labeled_graph([0, 0, 0, 1, 1, 2], [(0, 1), (0, 2), (0, 3), (0, 4)])
    report = homophily(star)
    assert report.ratios[0] == 0.5
    assert 0 in report.middle
    assert report.ratios[3] == 0.0 and 3 in report.disassortative
    assert np.isnan(report.ratios[5])
    assert report.isolated.tolist() == [5]
    assert 5 not in np.concatenate([report.assortative, report.disassortative, report.middle])


def test_homophily_matches_brute_force():
    """Test vectorized ratios against a per-node loop over networkx graphs."""
    rng = np.random.default_rng(8)
    for trial in range(50):
        nx_graph = nx.gnp_random_graph(15, 0.25, seed=trial)
        labels = rng.integers(0, 3, 15)
        graph = labeled_graph(labels, list(nx_graph.edges()))
        report = homophily(graph)
        for node in range(15):
            neighbors = list(nx_graph.neighbors(node))
            if not neighbors:
                assert np.isnan(report.ratios[node])
                continue
            expected = np.mean([labels[v] == labels[node] for v in neighbors])
            assert report.ratios[node] == pytest.approx(expected)
        covered = report.assortative.size + report.disassortative.size + report.middle.size
        assert covered == 15 - report.isolated.size


def test_synth_sbm_structure():
    """Test balanced blocks, feature shape and determinism."""
    first = synth_sbm(1000, 5, 0.02, 0.002, feat_dim=16, feat_noise=1.0, seed=0)
    second = synth_sbm(1000, 5, 0.02, 0.002, feat_dim=16, feat_noise=1.0, seed=0)
    assert first.features.shape == (1000, 16)
    assert np.bincount(first.labels).tolist() == [200] * 5
    assert (first.adj != second.adj).nnz == 0
    assert np.array_equal(first.features, second.features)


def test_synth_sbm_homophily_tracks_block_probabilities():
    """Test mean homophily against the block-model expectation and the extremes."""
    graph = synth_sbm(1000, 5, 0.02, 0.002, feat_dim=16, feat_noise=1.0, seed=0)
    expected = expected_homophily(5, 0.02, 0.002)
    assert expected == pytest.approx(0.714, abs=1e-3)
    assert homophily(graph).mean_ratio() == pytest.approx(expected, abs=0.05)

    pure = synth_sbm(300, 3, 0.05, 0.0, feat_dim=4, feat_noise=1.0, seed=1)
    assert homophily(pure).mean_ratio() == 1.0
    disjoint = synth_sbm(300, 3, 0.0, 0.05, feat_dim=4, feat_noise=1.0, seed=1)
    assert homophily(disjoint).mean_ratio() == 0.0


def test_synth_sbm_rejects_bad_arguments():
    with pytest.raises(BiktConfigurationError):
        synth_sbm(10, 1, 0.1, 0.1, 4, 1.0)
    with pytest.raises(BiktConfigurationError):
        synth_sbm(10, 2, 1.5, 0.1, 4, 1.0)


def test_balanced_sizes():
    assert balanced_sizes(11, 3) == [4, 4, 3]
