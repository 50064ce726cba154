"""
Supervised and BiKT training.
"""

from bikt.intelligence.training.config import EpochConfig, GeneratorConfig, TrainConfig
from bikt.intelligence.training.losses import (
    knowledge_infusion_loss,
    pseudo_supervision_loss,
    supervised_loss,
)
from bikt.intelligence.training.records import (
    BiktResult,
    EpochStats,
    IterationRecord,
    PhaseKind,
    PhaseRecord,
)
from bikt.intelligence.training.schedule import (
    estimate_cost,
    generator_fit_phase,
    phase_plan,
    phase_seed,
    run_bikt,
)
from bikt.intelligence.training.trainer import train_gnn_phase, train_mlp_phase, train_supervised

__all__ = [
    "BiktResult",
    "EpochConfig",
    "EpochStats",
    "GeneratorConfig",
    "IterationRecord",
    "PhaseKind",
    "PhaseRecord",
    "TrainConfig",
    "estimate_cost",
    "generator_fit_phase",
    "knowledge_infusion_loss",
    "phase_plan",
    "phase_seed",
    "pseudo_supervision_loss",
    "run_bikt",
    "supervised_loss",
    "train_gnn_phase",
    "train_mlp_phase",
    "train_supervised",
]
