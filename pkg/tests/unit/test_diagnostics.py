"""
Unit tests for evaluation, correct-set comparison, aggregation and investigation.
"""

import numpy as np
import pytest

from bikt.core.errors import AggregationError, EvaluationError
from bikt.core.graph import build_graph, homophily, make_splits
from bikt.core.models import build_layer_specs, build_model, init_params, PropagationKind
from bikt.diagnostics import (
    EvalReport,
    PredictionSet,
    aggregate_runs,
    assortativity_eval,
    eval_model,
    investigate,
    mlp_share_eval,
    union_intersection,
)
from bikt.intelligence.training import train_supervised


def prediction_set(correct_mask):
    """Labels all zero; nodes marked correct predict 0, the rest predict 1."""
    correct_mask = np.asarray(correct_mask, dtype=bool)
    nodes = np.arange(correct_mask.size)
    return PredictionSet(nodes, np.where(correct_mask, 0, 1), np.zeros(correct_mask.size, int))


def test_prediction_set_correct_and_accuracy():
    pred = PredictionSet(np.array([4, 1, 7]), np.array([1, 0, 2]), np.array([1, 1, 2]))
    assert pred.correct.tolist() == [4, 7]
    assert pred.accuracy == pytest.approx(2 / 3)
    assert pred.restrict(np.array([1, 7])).nodes.tolist() == [1, 7]


def test_union_intersection_examples():
    """Test identical and disjoint correct sets."""
    same = prediction_set(np.arange(100) < 50)
    assert union_intersection(same, same) == (0.5, 0.5)

    first = prediction_set(np.arange(100) < 30)
    second = prediction_set((np.arange(100) >= 30) & (np.arange(100) < 50))
    assert union_intersection(first, second) == (0.5, 0.0)


def test_union_intersection_bounds_on_random_sets():
    """Test union and intersection bracket both accuracies."""
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = prediction_set(rng.random(60) < rng.random())
        b = prediction_set(rng.random(60) < rng.random())
        union, intersection = union_intersection(a, b)
        assert union >= max(a.accuracy, b.accuracy) - 1e-12
        assert intersection <= min(a.accuracy, b.accuracy) + 1e-12
        assert union + intersection == pytest.approx(a.accuracy + b.accuracy)


def test_union_intersection_rejects_mismatched_nodes():
    a = prediction_set([True, False, True])
    b = PredictionSet(np.array([0, 1, 5]), np.zeros(3, int), np.zeros(3, int))
    with pytest.raises(EvaluationError):
        union_intersection(a, b)


def test_eval_model_constant_predictor(small_graph, small_masks):
    """Test uniform outputs predict class 0 everywhere."""
    params = init_params(build_layer_specs(8, 4, 3, 2), 0)
    for tensor in params.tensors():
        tensor[...] = 0.0
    model = build_model(params, PropagationKind.GCN_SYM, small_graph)
    pred, report = eval_model(model, small_graph, small_masks)
    test = small_masks.indices("test")
    assert np.all(pred.predicted == 0)
    assert report.accuracy == pytest.approx(np.mean(small_graph.labels[test] == 0))
    assert report.n_evaluated == test.size
    assert report.per_class_accuracy[0] == 1.0
    assert report.per_class_accuracy[1] == 0.0


def test_eval_model_is_pure(small_graph, small_masks, small_architecture, fast_cfg):
    specs = small_architecture.layer_specs(small_graph.feature_dim, small_graph.num_classes)
    model = build_model(init_params(specs, 1), PropagationKind.GCN_SYM, small_graph)
    before = model.params.snapshot()
    first = eval_model(model, small_graph, small_masks)[1]
    second = eval_model(model, small_graph, small_masks)[1]
    assert first == second
    assert model.params.equals(before)


def test_eval_model_rejects_empty_or_unknown_subsets(small_graph, small_masks):
    model = build_model(init_params(build_layer_specs(8, 4, 3, 2), 0), PropagationKind.GCN_SYM,
                        small_graph)
    with pytest.raises(EvaluationError):
        eval_model(model, small_graph, small_masks, subset=[])
    with pytest.raises(EvaluationError):
        eval_model(model, small_graph, small_masks, subset="holdout")


def test_mlp_share_matches_gnn_on_edgeless_graph():
    """Test the shared MLP and the GNN agree when the graph has no edges."""
    rng = np.random.default_rng(0)
    graph = build_graph(60, np.zeros((0, 2)), rng.normal(size=(60, 5)), np.arange(60) % 3)
    masks = make_splits(graph, 0.2, 0.2, seed=0)
    model = build_model(init_params(build_layer_specs(5, 6, 3, 2), 2), PropagationKind.GCN_SYM,
                        graph)
    assert mlp_share_eval(model, graph, masks) == eval_model(model, graph, masks)[1]


def test_assortativity_eval_partitions_evaluated_nodes(small_graph, small_masks):
    """Test subset counts cover every non-isolated evaluated node."""
    model = build_model(init_params(build_layer_specs(8, 4, 3, 2), 0), PropagationKind.GCN_SYM,
                        small_graph)
    pred, _ = eval_model(model, small_graph, small_masks)
    report = homophily(small_graph)
    evaluation = assortativity_eval(pred, report, small_graph.num_classes)
    isolated = np.isin(pred.nodes, report.isolated).sum()
    covered = evaluation.n_assortative + evaluation.n_disassortative + evaluation.n_middle
    assert covered == pred.nodes.size - isolated
    assert evaluation.accuracy == pred.accuracy


def test_aggregate_runs_mean_and_std():
    """Test two runs at 0.7 and 0.8 aggregate to 0.75 +- 0.0707."""
    summary = aggregate_runs([{"accuracy": 0.7}, {"accuracy": 0.8}])["accuracy"]
    assert summary.mean == pytest.approx(0.75)
    assert summary.std == pytest.approx(0.0707, abs=1e-4)
    assert summary.n == 2
    assert summary.format() == "0.7500 ± 0.0707"

    constant = aggregate_runs([{"accuracy": 0.6}] * 4)["accuracy"]
    assert constant.std == 0.0


def test_aggregate_runs_is_order_independent():
    runs = [{"accuracy": v, "middle_accuracy": None} for v in (0.61, 0.72, 0.55)]
    forward = aggregate_runs(runs)
    backward = aggregate_runs(list(reversed(runs)))
    assert forward["accuracy"].mean == pytest.approx(backward["accuracy"].mean, abs=1e-15)
    assert forward["accuracy"].std == pytest.approx(backward["accuracy"].std, abs=1e-15)
    assert forward["middle_accuracy"] is None


def test_aggregate_runs_accepts_reports_and_rejects_mismatch():
    reports = [EvalReport(accuracy=0.5, per_class_accuracy=[0.5]),
               EvalReport(accuracy=1.0, per_class_accuracy=[1.0])]
    assert aggregate_runs(reports)["class_0_accuracy"].mean == 0.75
    with pytest.raises(AggregationError):
        aggregate_runs([{"accuracy": 0.5}, {"precision": 0.5}])
    with pytest.raises(AggregationError):
        aggregate_runs([])


def test_investigate_compares_all_views(small_graph, small_masks, small_architecture, fast_cfg):
    """Test the investigation reports GNN, MLP_share and MLP_re with bounded set scores."""
    specs = small_architecture.layer_specs(small_graph.feature_dim, small_graph.num_classes)
    gnn = build_model(init_params(specs, fast_cfg.seed), PropagationKind.GCN_SYM, small_graph)
    train_supervised(gnn, small_graph, small_masks, fast_cfg)

    result = investigate(gnn, small_graph, small_masks, fast_cfg, small_architecture)
    assert set(result.reports) == {"gnn", "mlp_share", "mlp_re"}
    assert set(result.union) == {"mlp_share", "mlp_re"}
    assert "mlp_re" in result.records
    gnn_acc = result.reports["gnn"].accuracy
    for name in ("mlp_share", "mlp_re"):
        view_acc = result.reports[name].accuracy
        assert result.union[name] >= max(gnn_acc, view_acc) - 1e-12
        assert result.intersection[name] <= min(gnn_acc, view_acc) + 1e-12
