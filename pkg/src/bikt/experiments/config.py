"""
Experiment configuration schema.
"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from bikt.core.models.layers import Architecture, PropagationKind
from bikt.core.utils.transformers import stable_hash
from bikt.intelligence.training.config import TrainConfig


class RunMode(str, Enum):
    BIKT = "bikt"
    SUPERVISED = "supervised"
    INVESTIGATE = "investigate"


class SBMConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=2)
    num_classes: int = Field(ge=2)
    intra_p: float = Field(ge=0, le=1)
    inter_p: float = Field(ge=0, le=1)
    feat_dim: int = Field(default=16, ge=1)
    feat_noise: float = Field(default=1.0, ge=0)
    seed: int = 0


class DatasetConfig(BaseModel):
    """Either three dataset files or an SBM specification."""

    model_config = ConfigDict(extra="forbid")

    edges: Optional[Path] = None
    features: Optional[Path] = None
    labels: Optional[Path] = None
    sbm: Optional[SBMConfig] = None

    def file_paths(self) -> List[Optional[Path]]:
        return [self.edges, self.features, self.labels]

    @property
    def uses_files(self) -> bool:
        return any(path is not None for path in self.file_paths())


class SplitConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train_frac: float = Field(default=0.025, ge=0, lt=1)
    val_frac: float = Field(default=0.025, ge=0, lt=1)
    stratified: bool = True
    inductive: bool = False
    holdout_frac: float = Field(default=0.2, ge=0, lt=1)
    seed: Optional[int] = None
    splits_file: Optional[Path] = None


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layers: int = Field(default=2, ge=2)
    hidden: int = Field(default=64, ge=1)
    propagation: PropagationKind = PropagationKind.GCN_SYM
    dropout: float = Field(default=0.5, ge=0, lt=1)

    def architecture(self) -> Architecture:
        return Architecture(self.layers, self.hidden, self.propagation, self.dropout)


class RunConfig(BaseModel):
    """A complete experiment: dataset, splits, model, training and seeds."""

    model_config = ConfigDict(extra="forbid")

    dataset: DatasetConfig
    split: SplitConfig = Field(default_factory=SplitConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    mode: RunMode = RunMode.BIKT
    output_dir: Optional[Path] = Field(default=None, description="BIKT_OUTPUT_DIR if unset")
    seeds: List[int] = Field(min_length=1)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form."""
        return stable_hash(self.model_dump(mode="json"))

    def train_for_seed(self, seed: int) -> TrainConfig:
        return self.train.model_copy(update={"seed": seed})

    def resolve_paths(self, base_dir: Union[str, Path]) -> "RunConfig":
        """Copy with relative dataset and split paths anchored at ``base_dir``."""
        base_dir = Path(base_dir)

        def anchor(path: Optional[Path]) -> Optional[Path]:
            if path is None or path.is_absolute():
                return path
            return base_dir / path

        dataset = self.dataset.model_copy(update={
            "edges": anchor(self.dataset.edges),
            "features": anchor(self.dataset.features),
            "labels": anchor(self.dataset.labels),
        })
        split = self.split.model_copy(update={"splits_file": anchor(self.split.splits_file)})
        return self.model_copy(update={"dataset": dataset, "split": split})


def read_config_data(path: Union[str, Path]) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
