"""
Per-epoch and per-phase training records.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from bikt.core.models.layers import ModelParams
from bikt.core.models.network import MessagePassingModel
from bikt.intelligence.generator.generator import GeneratorParams


class PhaseKind(str, Enum):
    BASE_GNN = "BASE_GNN"
    GEN_GNN = "GEN_GNN"
    MLP = "MLP"
    GEN_MLP = "GEN_MLP"
    GNN = "GNN"
    MLP_RE = "MLP_RE"

    @property
    def is_generator(self) -> bool:
        return self in (PhaseKind.GEN_GNN, PhaseKind.GEN_MLP)


@dataclass(frozen=True)
class EpochStats:
    """
    Losses after one update.

    Generator phases leave ``loss_ki``, ``loss_ps`` and the accuracies unset and
    report the classification term as ``loss_sl``.
    """

    epoch: int
    loss_total: float
    loss_sl: float
    loss_ki: Optional[float] = None
    loss_ps: Optional[float] = None
    val_acc: Optional[float] = None
    train_acc: Optional[float] = None
    diversity: Optional[float] = None
    moment_gap: Optional[float] = None


@dataclass
class PhaseRecord:
    phase: PhaseKind
    epochs: List[EpochStats] = field(default_factory=list)
    alpha: float = 0.0
    beta: float = 0.0
    best_epoch: Optional[int] = None
    best_val_acc: Optional[float] = None
    initial_params: Optional[ModelParams] = None
    final_params: Optional[ModelParams] = None
    generator: Optional[GeneratorParams] = None
    mmd: Dict[str, Optional[float]] = field(default_factory=dict)
    wall_clock_s: float = 0.0

    @property
    def losses(self) -> List[float]:
        return [stats.loss_total for stats in self.epochs]

    @property
    def val_accuracies(self) -> List[Optional[float]]:
        return [stats.val_acc for stats in self.epochs]

    def summary(self) -> Dict[str, object]:
        """JSON-ready description without parameters or timing."""
        return {
            "phase": self.phase.value,
            "epochs": len(self.epochs),
            "alpha": self.alpha,
            "beta": self.beta,
            "best_epoch": self.best_epoch,
            "best_val_acc": self.best_val_acc,
            "final_loss": self.epochs[-1].loss_total if self.epochs else None,
            "mmd": dict(self.mmd),
        }


@dataclass(frozen=True)
class IterationRecord:
    """Accuracies of both views after a recurrence iteration (0 = base model)."""

    iteration: int
    gnn_val_acc: float
    gnn_test_acc: float
    mlp_val_acc: float
    mlp_test_acc: float


@dataclass
class BiktResult:
    params: ModelParams
    gnn: MessagePassingModel
    mlp: MessagePassingModel
    records: List[PhaseRecord]
    iterations: List[IterationRecord]

    @property
    def final_accuracy(self) -> Dict[str, float]:
        last = self.iterations[-1]
        return {"gnn": last.gnn_test_acc, "mlp": last.mlp_test_acc}

    def phase_sequence(self) -> List[PhaseKind]:
        return [record.phase for record in self.records]
