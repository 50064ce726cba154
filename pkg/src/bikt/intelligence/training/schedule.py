"""
The recurrent BiKT schedule.

A base GNN is trained first. Each iteration then fits a generator to the GNN's
representations, trains the MLP view, fits a generator to the MLP's
representations and trains the GNN view again. With parameter inheritance both
views share one parameter object throughout.
"""

import logging
import time
from typing import Dict, List, Optional, Tuple

import numpy as np

from bikt.core.errors import StructureError
from bikt.core.graph.models import Graph, SplitMasks
from bikt.core.models.layers import Architecture, ModelParams, PropagationKind, init_params
from bikt.core.models.network import (
    MessagePassingModel,
    build_model,
    derive_mlp,
    rebind,
    split_extractor_classifier,
)
from bikt.core.tensor.ops import value_of
from bikt.core.utils.metrics import accuracy, argmax_rows
from bikt.intelligence.generator.generator import (
    GeneratorEpoch,
    GeneratorParams,
    class_moments,
    generate,
    init_generator,
    train_generator,
)
from bikt.intelligence.generator.mmd import mmd_rbf
from bikt.intelligence.training.config import TrainConfig
from bikt.intelligence.training.records import (
    BiktResult,
    EpochStats,
    IterationRecord,
    PhaseKind,
    PhaseRecord,
)
from bikt.intelligence.training.trainer import (
    phase_streams,
    train_gnn_phase,
    train_mlp_phase,
    train_supervised,
)

logger = logging.getLogger(__name__)

ITERATION_PHASES = (PhaseKind.GEN_GNN, PhaseKind.MLP, PhaseKind.GEN_MLP, PhaseKind.GNN)


def phase_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th phase of a run."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def phase_plan(iterations: int, knowledge_transfer: bool = True) -> List[PhaseKind]:
    """Phases a run executes, in order."""
    plan = [PhaseKind.BASE_GNN]
    for _ in range(iterations):
        plan.extend(p for p in ITERATION_PHASES if knowledge_transfer or not p.is_generator)
    return plan


def estimate_cost(graph: Graph, hidden: int, layers: int, iterations: int) -> Dict[str, int]:
    """
    Nominal multiply-add counts per training epoch summed over the recurrence:
    propagation ``t * L * m * d`` and transformation ``3 * t * L * n * d^2``.
    """
    propagation = iterations * layers * graph.num_edges * hidden
    transformation = 3 * iterations * layers * graph.n * hidden * hidden
    return {
        "propagation": propagation,
        "transformation": transformation,
        "total": propagation + transformation,
    }


def generator_fit_phase(
    view: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    phase: PhaseKind = PhaseKind.GEN_GNN,
    seed: Optional[int] = None,
    warm_start: Optional[GeneratorParams] = None,
) -> Tuple[GeneratorParams, PhaseRecord]:
    """
    Fit a generator to a view's class-conditional representations.

    The view's classifier is frozen. Samples are pulled towards the per-class
    moments of the view's representations of the observed nodes, grouped by the
    view's own predictions. MMD between generated samples (for the training
    labels, with fixed evaluation noise) and the view's representations of the
    training nodes is recorded before training, halfway and at the end.

    Returns:
        The trained generator and the phase record
    """
    seed = cfg.seed if seed is None else seed
    _, classifier = split_extractor_classifier(view.params)
    train_nodes = masks.indices("train")
    train_labels = graph.labels[train_nodes]
    output = view.forward(graph.features)
    all_representations = value_of(output.representations)
    representations = all_representations[train_nodes]
    observed = masks.indices("observed")
    moments = class_moments(
        all_representations[observed],
        argmax_rows(value_of(output.probabilities))[observed],
        graph.num_classes,
    )

    if warm_start is not None and cfg.warm_start_generators:
        generator = warm_start
    else:
        generator = init_generator(graph.num_classes, classifier.in_dim, seed)
    training_rng, eval_rng = phase_streams(seed)
    eval_noise = eval_rng.standard_normal((train_nodes.size, generator.latent_dim))

    def fit() -> Optional[float]:
        if train_nodes.size < 2:
            return None
        samples = value_of(generate(generator, train_labels, eval_noise))
        return mmd_rbf(samples, representations)

    epochs = cfg.epochs.gen
    midpoint = max(1, epochs // 2)
    record = PhaseRecord(phase=phase)
    record.mmd["initial"] = fit()

    def on_epoch(stats: GeneratorEpoch) -> None:
        record.epochs.append(EpochStats(
            epoch=stats.epoch,
            loss_total=stats.loss,
            loss_sl=stats.classification,
            diversity=stats.diversity,
            moment_gap=stats.fit,
        ))
        if stats.epoch + 1 == midpoint:
            record.mmd["mid"] = fit()

    started = time.perf_counter()
    train_generator(
        generator,
        classifier,
        cfg.label_prior,
        epochs=epochs,
        lr=cfg.generator.lr,
        lambda_ms=cfg.generator.lambda_ms,
        count=cfg.sample_count(train_nodes.size),
        seed=training_rng,
        train_labels=train_labels,
        on_epoch=on_epoch,
        moments=moments,
        lambda_fit=cfg.generator.lambda_fit,
    )
    record.mmd["final"] = fit()
    record.wall_clock_s = time.perf_counter() - started
    record.generator = generator.snapshot()
    logger.info(
        f"{phase.value}: MMD {record.mmd['initial']} -> {record.mmd.get('mid')} "
        f"-> {record.mmd['final']}"
    )
    return generator, record


def _view_accuracy(
    model: MessagePassingModel, graph: Graph, masks: SplitMasks
) -> Tuple[float, float]:
    predicted = argmax_rows(model.predict_proba(graph.features))
    val, test = masks.indices("val"), masks.indices("test")
    return (
        accuracy(predicted[val], graph.labels[val]),
        accuracy(predicted[test], graph.labels[test]),
    )


def _iteration_record(
    iteration: int,
    gnn: MessagePassingModel,
    mlp: MessagePassingModel,
    eval_graph: Graph,
    masks: SplitMasks,
) -> IterationRecord:
    gnn_val, gnn_test = _view_accuracy(rebind(gnn, eval_graph), eval_graph, masks)
    mlp_val, mlp_test = _view_accuracy(mlp, eval_graph, masks)
    logger.info(f"iteration {iteration}: GNN test {gnn_test:.4f}, MLP test {mlp_test:.4f}")
    return IterationRecord(iteration, gnn_val, gnn_test, mlp_val, mlp_test)


def run_bikt(
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    architecture: Optional[Architecture] = None,
    eval_graph: Optional[Graph] = None,
) -> BiktResult:
    """
    Run the full schedule.

    Args:
        graph: Training graph (edges of unobserved nodes already removed when inductive)
        masks: Split masks
        cfg: Training configuration
        architecture: Model shape; defaults to a 2-layer GCN with 64 hidden units
        eval_graph: Graph for evaluation; defaults to ``graph``

    Returns:
        Final shared parameters, both views, every phase record and the
        per-iteration accuracy trajectory
    """
    architecture = architecture or Architecture()
    if architecture.propagation is PropagationKind.IDENTITY:
        raise StructureError("the host model needs a graph propagation, not identity")
    eval_graph = eval_graph or graph
    specs = architecture.layer_specs(graph.feature_dim, graph.num_classes)

    params = init_params(specs, cfg.seed)
    gnn = build_model(params, architecture.propagation, graph)
    mlp = derive_mlp(gnn)
    records: List[PhaseRecord] = [train_supervised(gnn, graph, masks, cfg)]
    iterations = [_iteration_record(0, gnn, mlp, eval_graph, masks)]

    gen_gnn: Optional[GeneratorParams] = None
    gen_mlp: Optional[GeneratorParams] = None
    index = 1
    for iteration in range(1, cfg.iterations + 1):
        if cfg.knowledge_transfer:
            gen_gnn, record = generator_fit_phase(
                gnn, graph, masks, cfg, PhaseKind.GEN_GNN, phase_seed(cfg.seed, index), gen_gnn
            )
            records.append(record)
            index += 1

        if not cfg.inherit_parameters:
            fresh: ModelParams = init_params(specs, phase_seed(cfg.seed, index))
            mlp = derive_mlp(build_model(fresh, architecture.propagation, graph))
        gnn_predictions = gnn.predict_proba(graph.features)
        records.append(train_mlp_phase(
            mlp, graph, masks, gen_gnn, gnn_predictions, cfg,
            seed=phase_seed(cfg.seed, index), gnn_view=gnn,
        ))
        index += 1

        if cfg.knowledge_transfer:
            gen_mlp, record = generator_fit_phase(
                mlp, graph, masks, cfg, PhaseKind.GEN_MLP, phase_seed(cfg.seed, index), gen_mlp
            )
            records.append(record)
            index += 1

        records.append(train_gnn_phase(gnn, graph, masks, gen_mlp, cfg,
                                       seed=phase_seed(cfg.seed, index)))
        index += 1
        iterations.append(_iteration_record(iteration, gnn, mlp, eval_graph, masks))

    return BiktResult(params=params, gnn=gnn, mlp=mlp, records=records, iterations=iterations)
