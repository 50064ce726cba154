"""
Training hyperparameters.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from bikt.intelligence.generator.generator import LabelPrior


class EpochConfig(BaseModel):
    """Epoch budget per phase type."""

    model_config = ConfigDict(extra="forbid")

    base: int = Field(default=200, ge=1)
    gnn: int = Field(default=200, ge=1)
    mlp: int = Field(default=200, ge=1)
    gen: int = Field(default=200, ge=1)


class GeneratorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lr: float = Field(default=1e-3, gt=0)
    lambda_ms: float = Field(default=1.0, ge=0)
    lambda_fit: float = Field(
        default=10.0, ge=0, description="Weight of the pull towards the view's class moments"
    )
    samples: Optional[int] = Field(default=None, ge=1, description="Samples per epoch; 2 x |train| if unset")


class TrainConfig(BaseModel):
    """
    Loss weights, schedule length and optimizer settings of a BiKT run.

    ``alpha`` weighs knowledge infusion and ``beta`` pseudo-supervision.
    """

    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)
    iterations: int = Field(default=3, ge=0)
    epochs: EpochConfig = Field(default_factory=EpochConfig)
    lr: float = Field(default=0.01, gt=0)
    weight_decay: float = Field(default=5e-4, ge=0)
    label_prior: LabelPrior = LabelPrior.UNIFORM
    seed: int = 0
    knowledge_transfer: bool = True
    inherit_parameters: bool = True
    warm_start_generators: bool = False
    refresh_pseudo_labels: bool = False
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    log_every: int = Field(default=50, ge=1)

    def sample_count(self, num_train: int) -> int:
        """Generated samples per epoch."""
        if self.generator.samples is not None:
            return self.generator.samples
        return max(1, 2 * num_train)
