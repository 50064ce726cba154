"""
Conditional generator of representations.

G(y, eps) = W2 . relu(W1 . [onehot(y), eps] + b1) + b2, with input width C + d,
hidden width 2d and output width d, where d is the classifier input width.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import NDArray

from bikt.core.errors import (
    BiktConfigurationError,
    DimensionError,
    SampleSizeError,
    TrainingError,
)
from bikt.core.models.checkpoint import GENERATOR_MAGIC, read_layers, write_layers
from bikt.core.models.layers import BoundParams, LayerSpec, ModelParams, init_params
from bikt.core.models.network import Classifier
from bikt.core.tensor.matrix import Matrix
from bikt.core.tensor.ops import (
    abs_,
    add,
    add_bias,
    concat_cols,
    matmul,
    relu,
    scalar,
    scale,
    scale_rows,
    softmax_cross_entropy,
    sub,
    sum_all,
    value_of,
)
from bikt.core.tensor.tape import GradTape, Value
from bikt.intelligence.optimizers.adam import Adam

logger = logging.getLogger(__name__)

NOISE_DISTANCE_FLOOR = 1e-5

SeedLike = Union[int, np.random.Generator]


class LabelPrior(str, Enum):
    UNIFORM = "uniform"
    EMPIRICAL = "empirical"


@dataclass(eq=False)
class GeneratorParams:
    num_classes: int
    network: ModelParams

    def __post_init__(self):
        if self.network.num_layers != 2:
            raise DimensionError("the generator has exactly two layers")
        if self.network.in_dim != self.num_classes + self.latent_dim:
            raise DimensionError(
                f"generator input width {self.network.in_dim} != "
                f"{self.num_classes} classes + {self.latent_dim} noise dims"
            )

    @property
    def latent_dim(self) -> int:
        return self.network.num_classes

    @property
    def hidden_dim(self) -> int:
        return self.network.hidden_dim

    def snapshot(self) -> "GeneratorParams":
        return GeneratorParams(self.num_classes, self.network.snapshot())


def init_generator(num_classes: int, latent_dim: int, seed: int) -> GeneratorParams:
    specs = [
        LayerSpec(num_classes + latent_dim, 2 * latent_dim, has_activation=True),
        LayerSpec(2 * latent_dim, latent_dim, has_activation=False),
    ]
    return GeneratorParams(num_classes, init_params(specs, seed))


def save_generator(gen: GeneratorParams, path: Union[str, Path]) -> Path:
    return write_layers(path, gen.network.weights, gen.network.biases, GENERATOR_MAGIC)


def load_generator(path: Union[str, Path], num_classes: int) -> GeneratorParams:
    weights, biases = read_layers(path, GENERATOR_MAGIC)
    specs = [
        LayerSpec(w.shape[0], w.shape[1], has_activation=i == 0) for i, w in enumerate(weights)
    ]
    return GeneratorParams(num_classes, ModelParams(tuple(specs), weights, biases))


def generate(
    gen: GeneratorParams, labels: NDArray, noise: Value, bound: Optional[BoundParams] = None
) -> Value:
    """Samples G(labels, noise); pass ``bound`` to record generator gradients."""
    noise_width = value_of(noise).shape[1]
    if noise_width != gen.latent_dim:
        raise DimensionError(f"noise width {noise_width} != latent width {gen.latent_dim}")
    if bound is None:
        bound = gen.network.bind()
    onehot = np.eye(gen.num_classes)[np.asarray(labels, dtype=np.int64)]
    hidden = relu(add_bias(matmul(concat_cols(onehot, noise), bound.weights[0]), bound.biases[0]))
    return add_bias(matmul(hidden, bound.weights[1]), bound.biases[1])


@dataclass(frozen=True)
class GenBatch:
    labels: NDArray[np.int64]
    noise: Matrix
    samples: Matrix


def label_probabilities(
    prior: LabelPrior, num_classes: int, train_labels: Optional[NDArray] = None
) -> NDArray[np.float64]:
    prior = LabelPrior(prior)
    if prior is LabelPrior.UNIFORM:
        return np.full(num_classes, 1.0 / num_classes)
    if train_labels is None or len(train_labels) == 0:
        raise BiktConfigurationError("the empirical label prior needs training labels")
    counts = np.bincount(np.asarray(train_labels, dtype=np.int64), minlength=num_classes)
    return counts / counts.sum()


def sample(
    gen: GeneratorParams,
    count: int,
    label_prior: LabelPrior = LabelPrior.UNIFORM,
    seed: SeedLike = 0,
    train_labels: Optional[NDArray] = None,
) -> GenBatch:
    """
    Draw ``count`` labels from the prior and standard-normal noise, then generate.

    Args:
        gen: Generator parameters
        count: Number of samples K
        label_prior: ``uniform`` or ``empirical`` (training label frequencies)
        seed: Seed or an existing random generator
        train_labels: Labels of the training nodes, for the empirical prior
    """
    if count < 1:
        raise BiktConfigurationError(f"sample count must be >= 1, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = label_probabilities(label_prior, gen.num_classes, train_labels)
    labels = rng.choice(gen.num_classes, size=count, p=probs)
    noise = rng.standard_normal((count, gen.latent_dim))
    samples = value_of(generate(gen, labels, noise))
    return GenBatch(labels=labels, noise=noise, samples=samples)


def diversity_from_samples(first: Value, second: Value, noise1: Matrix, noise2: Matrix) -> Value:
    """
    Mean over rows of output L1/dim distance divided by noise L1/dim distance.

    Noise distances are floored at 1e-5.
    """
    rows, width = value_of(first).shape
    noise_distance = np.abs(noise1 - noise2).mean(axis=1)
    weights = 1.0 / (width * np.maximum(noise_distance, NOISE_DISTANCE_FLOOR) * rows)
    return sum_all(scale_rows(abs_(sub(first, second)), weights))


def mode_seeking_term(
    gen: GeneratorParams,
    labels: NDArray,
    noise1: Matrix,
    noise2: Matrix,
    bound: Optional[BoundParams] = None,
) -> Value:
    if np.shape(noise1) != np.shape(noise2):
        raise DimensionError("both noise draws must have the same shape")
    first = generate(gen, labels, noise1, bound)
    second = generate(gen, labels, noise2, bound)
    return diversity_from_samples(first, second, noise1, noise2)


@dataclass(frozen=True)
class ClassMoments:
    """Per-class mean and mean absolute deviation of representations, C x d each."""

    mean: Matrix
    spread: Matrix

    @property
    def num_classes(self) -> int:
        return self.mean.shape[0]


def class_moments(
    representations: Matrix, labels: NDArray, num_classes: int
) -> ClassMoments:
    """
    Moments of ``representations`` grouped by ``labels``.

    Classes without members fall back to the moments of the whole sample.

    Raises:
        SampleSizeError: If there are no representations
        DimensionError: If labels and rows disagree
    """
    reps = np.asarray(representations, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if reps.ndim != 2 or reps.shape[0] == 0:
        raise SampleSizeError("class moments need at least one representation")
    if labels.shape != (reps.shape[0],):
        raise DimensionError(f"expected {reps.shape[0]} labels, got shape {labels.shape}")
    overall = reps.mean(axis=0)
    mean = np.tile(overall, (num_classes, 1))
    spread = np.tile(np.abs(reps - overall).mean(axis=0), (num_classes, 1))
    for c in np.unique(labels):
        members = reps[labels == c]
        mean[c] = members.mean(axis=0)
        spread[c] = np.abs(members - mean[c]).mean(axis=0)
    return ClassMoments(mean=mean, spread=spread)


def moment_matching_term(samples: Value, labels: NDArray, moments: ClassMoments) -> Value:
    """
    Mean absolute gap between the per-class mean and mean absolute deviation
    of ``samples`` and the target ``moments``, over the classes present in
    ``labels``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    width = value_of(samples).shape[1]
    if moments.mean.shape[1] != width:
        raise DimensionError(f"moments of width {moments.mean.shape[1]} for samples of width {width}")
    present, members, counts = np.unique(labels, return_inverse=True, return_counts=True)
    onehot = np.eye(present.size)[members]
    averaging = onehot.T / counts[:, None]

    mean = matmul(averaging, samples)
    spread = matmul(averaging, abs_(sub(samples, matmul(onehot, mean))))
    gap = add(abs_(sub(mean, moments.mean[present])), abs_(sub(spread, moments.spread[present])))
    return scale(sum_all(gap), 1.0 / (present.size * width))


@dataclass(frozen=True)
class GeneratorEpoch:
    epoch: int
    loss: float
    classification: float
    diversity: float
    fit: Optional[float] = None


def generator_loss(
    gen: GeneratorParams,
    classifier: Classifier,
    labels: NDArray,
    noise1: Matrix,
    noise2: Matrix,
    lambda_ms: float,
    bound: Optional[BoundParams] = None,
    moments: Optional[ClassMoments] = None,
    lambda_fit: float = 0.0,
):
    """
    Classification loss of G(y, noise1) under the frozen classifier minus
    ``lambda_ms`` times the mode-seeking term, plus ``lambda_fit`` times the
    moment-matching term when target ``moments`` are given.

    Returns:
        (total, classification term, diversity term, moment term or None)
    """
    first = generate(gen, labels, noise1, bound)
    classification = softmax_cross_entropy(classifier(first), labels)
    total = classification
    diversity = np.zeros((1, 1))
    if lambda_ms != 0.0:
        second = generate(gen, labels, noise2, bound)
        diversity = diversity_from_samples(first, second, noise1, noise2)
        total = sub(total, scale(diversity, lambda_ms))
    fit = None
    if moments is not None:
        fit = moment_matching_term(first, labels, moments)
        if lambda_fit != 0.0:
            total = add(total, scale(fit, lambda_fit))
    return total, classification, diversity, fit


def train_generator(
    gen: GeneratorParams,
    classifier: Classifier,
    label_prior: LabelPrior,
    epochs: int,
    lr: float,
    lambda_ms: float,
    count: int,
    seed: SeedLike,
    train_labels: Optional[NDArray] = None,
    on_epoch: Optional[Callable[[GeneratorEpoch], None]] = None,
    moments: Optional[ClassMoments] = None,
    lambda_fit: float = 0.0,
) -> GeneratorParams:
    """
    Fit the generator against a frozen classifier with Adam.

    Labels and both noise draws are resampled every epoch. The classifier
    parameters are read but never written.

    Args:
        gen: Generator to train in place
        classifier: Frozen classifier over representations
        label_prior: Prior over generated labels
        epochs: Number of updates
        lr: Adam learning rate
        lambda_ms: Weight of the mode-seeking term (>= 0)
        count: Samples per epoch K
        seed: Seed or random generator for labels and noise
        train_labels: Training labels, for the empirical prior
        on_epoch: Called after every update with the epoch's losses
        moments: Per-class representation moments the samples are pulled towards
        lambda_fit: Weight of the moment-matching term (>= 0)

    Returns:
        The trained generator (the same object)

    Raises:
        TrainingError: If the loss becomes non-finite
    """
    if lambda_ms < 0:
        raise BiktConfigurationError(f"lambda_ms must be >= 0, got {lambda_ms}")
    if lambda_fit < 0:
        raise BiktConfigurationError(f"lambda_fit must be >= 0, got {lambda_fit}")
    if classifier.in_dim != gen.latent_dim or classifier.out_dim != gen.num_classes:
        raise DimensionError("generator and classifier widths do not match")
    if moments is not None and moments.mean.shape != (gen.num_classes, gen.latent_dim):
        raise DimensionError(
            f"moments {moments.mean.shape} do not fit {gen.num_classes} classes "
            f"x {gen.latent_dim} dims"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = label_probabilities(label_prior, gen.num_classes, train_labels)
    optimizer = Adam(gen.network.tensors(), lr=lr)

    for epoch in range(epochs):
        labels = rng.choice(gen.num_classes, size=count, p=probs)
        noise1 = rng.standard_normal((count, gen.latent_dim))
        noise2 = rng.standard_normal((count, gen.latent_dim))

        tape = GradTape()
        bound = gen.network.bind(tape)
        total, classification, diversity, fit = generator_loss(
            gen, classifier, labels, noise1, noise2, lambda_ms, bound, moments, lambda_fit
        )
        loss = scalar(total)
        if not np.isfinite(loss):
            raise TrainingError("generator loss is not finite", phase="generator", epoch=epoch)
        optimizer.step(tape.gradient(total, bound.nodes()))

        stats = GeneratorEpoch(
            epoch,
            loss,
            scalar(classification),
            scalar(diversity),
            None if fit is None else scalar(fit),
        )
        if on_epoch is not None:
            on_epoch(stats)
        logger.debug(
            f"generator epoch {epoch}: loss={stats.loss:.4f} "
            f"ce={stats.classification:.4f} div={stats.diversity:.4f} fit={stats.fit}"
        )
    return gen
