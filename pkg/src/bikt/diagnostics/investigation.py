"""
Empirical comparison of a trained GNN with its structure-free counterparts:
the shared-parameter MLP and an MLP trained from scratch.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from bikt.core.graph.homophily import homophily
from bikt.core.graph.models import Graph, SplitMasks
from bikt.core.models.layers import Architecture, PropagationKind, init_params
from bikt.core.models.network import MessagePassingModel, build_model, derive_mlp
from bikt.diagnostics.evaluation import EvalReport, eval_model, union_intersection
from bikt.intelligence.training.config import TrainConfig
from bikt.intelligence.training.records import PhaseKind, PhaseRecord
from bikt.intelligence.training.schedule import phase_seed
from bikt.intelligence.training.trainer import train_supervised

logger = logging.getLogger(__name__)

MLP_RE_SEED_INDEX = 10_000


def train_mlp_re(
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    architecture: Optional[Architecture] = None,
) -> Tuple[MessagePassingModel, PhaseRecord]:
    """Fresh parameters trained with identity propagation and the GNN's hyperparameters."""
    architecture = architecture or Architecture()
    seed = phase_seed(cfg.seed, MLP_RE_SEED_INDEX)
    params = init_params(architecture.layer_specs(graph.feature_dim, graph.num_classes), seed)
    model = build_model(params, PropagationKind.IDENTITY, graph)
    record = train_supervised(model, graph, masks, cfg, phase=PhaseKind.MLP_RE, seed=seed)
    return model, record


@dataclass
class Investigation:
    reports: Dict[str, EvalReport] = field(default_factory=dict)
    union: Dict[str, float] = field(default_factory=dict)
    intersection: Dict[str, float] = field(default_factory=dict)
    records: Dict[str, PhaseRecord] = field(default_factory=dict)


def investigate(
    gnn: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    architecture: Optional[Architecture] = None,
    eval_graph: Optional[Graph] = None,
    mlp_re: Optional[MessagePassingModel] = None,
) -> Investigation:
    """
    Compare a trained GNN with MLP_share and MLP_re on the test split.

    Args:
        gnn: Trained GNN
        graph: Training graph (used to train MLP_re when not given)
        masks: Split masks
        cfg: Hyperparameters shared with the GNN
        architecture: Architecture shared with the GNN
        eval_graph: Full graph for evaluation; defaults to ``graph``
        mlp_re: Already trained MLP_re

    Returns:
        Reports with homophily breakdowns, and union and intersection accuracies of
        the GNN's correct set with each MLP's correct set
    """
    eval_graph = eval_graph or graph
    result = Investigation()
    if mlp_re is None:
        mlp_re, result.records["mlp_re"] = train_mlp_re(graph, masks, cfg, architecture)

    report = homophily(eval_graph)
    gnn_pred, result.reports["gnn"] = eval_model(gnn, eval_graph, masks, "test", report)
    views = {"mlp_share": derive_mlp(gnn), "mlp_re": mlp_re}
    for name, view in views.items():
        pred, result.reports[name] = eval_model(view, eval_graph, masks, "test", report)
        result.union[name], result.intersection[name] = union_intersection(gnn_pred, pred)
        logger.info(
            f"GNN vs {name}: union {result.union[name]:.4f}, "
            f"intersection {result.intersection[name]:.4f}"
        )
    return result
