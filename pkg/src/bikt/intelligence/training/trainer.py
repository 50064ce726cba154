"""
Model training phases: plain supervised, GNN with knowledge infusion, and MLP
with knowledge infusion plus pseudo-supervision from GNN predictions.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from bikt.core.errors import DimensionError, TrainingError
from bikt.core.graph.models import Graph, SplitMasks
from bikt.core.models.layers import BoundParams
from bikt.core.models.network import (
    ForwardOutput,
    MessagePassingModel,
    Mode,
    derive_mlp,
    split_extractor_classifier,
)
from bikt.core.tensor.matrix import Matrix
from bikt.core.tensor.ops import add, scalar, scale
from bikt.core.tensor.tape import GradTape, Value
from bikt.core.utils.metrics import accuracy, argmax_rows
from bikt.intelligence.generator.generator import GeneratorParams, sample
from bikt.intelligence.optimizers.adam import Adam
from bikt.intelligence.training.config import TrainConfig
from bikt.intelligence.training.losses import (
    knowledge_infusion_loss,
    pseudo_supervision_loss,
    supervised_loss,
)
from bikt.intelligence.training.records import EpochStats, PhaseKind, PhaseRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossTerm:
    """An extra weighted loss evaluated once per epoch."""

    name: str
    weight: float
    compute: Callable[[BoundParams, ForwardOutput, np.random.Generator], Value]


def phase_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Independent dropout and sampling streams for one phase."""
    dropout_seq, sampling_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(dropout_seq), np.random.default_rng(sampling_seq)


def _run_phase(
    model: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    phase: PhaseKind,
    epochs: int,
    seed: int,
    terms: List[LossTerm],
    before_epoch: Optional[Callable[[int], None]] = None,
) -> PhaseRecord:
    train_nodes = masks.indices("train")
    val_nodes = masks.indices("val")
    if train_nodes.size == 0:
        raise TrainingError("the training split is empty", phase=phase.value)

    params = model.params
    weights = {term.name: term.weight for term in terms}
    record = PhaseRecord(
        phase=phase,
        alpha=weights.get("ki", 0.0),
        beta=weights.get("ps", 0.0),
        initial_params=params.snapshot(),
    )
    dropout_rng, sampling_rng = phase_streams(seed)
    optimizer = Adam(params.tensors(), lr=cfg.lr, weight_decay=cfg.weight_decay)
    best = params.snapshot()
    started = time.perf_counter()
    logger.info(f"{phase.value}: training for {epochs} epochs ({', '.join(weights) or 'sl only'})")

    for epoch in range(epochs):
        if before_epoch is not None:
            before_epoch(epoch)
        tape = GradTape()
        bound = params.bind(tape)
        output = model.forward(graph.features, Mode.TRAIN, rng=dropout_rng, bound=bound)
        sl = supervised_loss(output.logits, graph.labels, train_nodes)
        total = sl
        components = {"ki": 0.0, "ps": 0.0}
        for term in terms:
            value = term.compute(bound, output, sampling_rng)
            components[term.name] = scalar(value)
            total = add(total, scale(value, term.weight))

        loss = scalar(total)
        if not np.isfinite(loss):
            raise TrainingError("loss is not finite", phase=phase.value, epoch=epoch)
        optimizer.step(tape.gradient(total, bound.nodes()))

        predicted = argmax_rows(model.predict_proba(graph.features))
        val_acc = accuracy(predicted[val_nodes], graph.labels[val_nodes]) if val_nodes.size else None
        train_acc = accuracy(predicted[train_nodes], graph.labels[train_nodes])
        record.epochs.append(EpochStats(
            epoch=epoch,
            loss_total=loss,
            loss_sl=scalar(sl),
            loss_ki=components["ki"],
            loss_ps=components["ps"],
            val_acc=val_acc,
            train_acc=train_acc,
        ))

        if val_acc is None or record.best_val_acc is None or val_acc > record.best_val_acc:
            record.best_epoch, record.best_val_acc = epoch, val_acc
            best = params.snapshot()
        if (epoch + 1) % cfg.log_every == 0:
            logger.debug(f"{phase.value} epoch {epoch + 1}/{epochs}: loss={loss:.4f} val={val_acc}")

    params.load_(best)
    record.final_params = params.snapshot()
    record.wall_clock_s = time.perf_counter() - started
    logger.info(
        f"{phase.value}: best epoch {record.best_epoch} with validation accuracy "
        f"{record.best_val_acc}"
    )
    return record


def _infusion_term(
    model: MessagePassingModel,
    generator: Optional[GeneratorParams],
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
) -> List[LossTerm]:
    if generator is None or cfg.alpha == 0.0 or not cfg.knowledge_transfer:
        return []
    _, classifier = split_extractor_classifier(model.params)
    if generator.latent_dim != classifier.in_dim:
        raise DimensionError(
            f"generator emits width {generator.latent_dim}, classifier takes {classifier.in_dim}"
        )
    train_labels = graph.labels[masks.indices("train")]
    count = cfg.sample_count(train_labels.size)

    def compute(bound: BoundParams, output: ForwardOutput, rng: np.random.Generator) -> Value:
        batch = sample(generator, count, cfg.label_prior, rng, train_labels)
        return knowledge_infusion_loss(batch, classifier, bound)

    return [LossTerm("ki", cfg.alpha, compute)]


def train_supervised(
    model: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    cfg: TrainConfig,
    epochs: Optional[int] = None,
    phase: PhaseKind = PhaseKind.BASE_GNN,
    seed: Optional[int] = None,
) -> PhaseRecord:
    """
    Cross-entropy training on the train split with Adam and weight decay.

    Parameters are updated in place and end at the epoch with the best
    validation accuracy (earliest on ties).

    Args:
        model: Model whose parameters are trained
        graph: Training graph (its features and labels)
        masks: Split masks
        cfg: Training configuration
        epochs: Defaults to ``cfg.epochs.base``
        phase: Phase label for the record
        seed: Defaults to ``cfg.seed``

    Returns:
        Record of the phase

    Raises:
        TrainingError: If the loss becomes non-finite
    """
    epochs = cfg.epochs.base if epochs is None else epochs
    seed = cfg.seed if seed is None else seed
    return _run_phase(model, graph, masks, cfg, phase, epochs, seed, [])


def train_gnn_phase(
    model: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    generator: Optional[GeneratorParams],
    cfg: TrainConfig,
    seed: Optional[int] = None,
    phase: PhaseKind = PhaseKind.GNN,
) -> PhaseRecord:
    """Supervised loss plus ``alpha`` times knowledge infusion from the MLP's generator."""
    seed = cfg.seed if seed is None else seed
    terms = _infusion_term(model, generator, graph, masks, cfg)
    return _run_phase(model, graph, masks, cfg, phase, cfg.epochs.gnn, seed, terms)


def train_mlp_phase(
    model: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    generator: Optional[GeneratorParams],
    gnn_predictions: Matrix,
    cfg: TrainConfig,
    seed: Optional[int] = None,
    gnn_view: Optional[MessagePassingModel] = None,
) -> PhaseRecord:
    """
    Train the structure-free view.

    The loss is supervised loss + alpha * knowledge infusion from the GNN's
    generator + beta * KL(GNN predictions || MLP predictions) over observed nodes.
    With ``refresh_pseudo_labels`` and a ``gnn_view`` the GNN predictions are
    recomputed before every epoch.
    """
    seed = cfg.seed if seed is None else seed
    mlp = derive_mlp(model)
    expected = (graph.n, mlp.params.num_classes)
    if gnn_predictions.shape != expected:
        raise DimensionError(f"GNN predictions must be {expected}, got {gnn_predictions.shape}")

    terms = _infusion_term(mlp, generator, graph, masks, cfg)
    before_epoch = None
    if cfg.beta > 0.0:
        observed = masks.indices("observed")
        targets = {"probs": np.asarray(gnn_predictions)}

        if cfg.refresh_pseudo_labels and gnn_view is not None:
            def before_epoch(epoch: int) -> None:
                targets["probs"] = gnn_view.predict_proba(graph.features)

        def compute(bound: BoundParams, output: ForwardOutput, rng: np.random.Generator) -> Value:
            return pseudo_supervision_loss(targets["probs"], output.probabilities, observed)

        terms.append(LossTerm("ps", cfg.beta, compute))
    return _run_phase(mlp, graph, masks, cfg, PhaseKind.MLP, cfg.epochs.mlp, seed, terms,
                      before_epoch)
