"""
Conditional generators of class-conditional representations.
"""

from bikt.intelligence.generator.generator import (
    ClassMoments,
    GenBatch,
    GeneratorEpoch,
    GeneratorParams,
    LabelPrior,
    class_moments,
    generate,
    generator_loss,
    init_generator,
    label_probabilities,
    load_generator,
    mode_seeking_term,
    moment_matching_term,
    sample,
    save_generator,
    train_generator,
)
from bikt.intelligence.generator.mmd import median_bandwidth, mmd_rbf

__all__ = [
    "ClassMoments",
    "GenBatch",
    "GeneratorEpoch",
    "GeneratorParams",
    "LabelPrior",
    "class_moments",
    "generate",
    "generator_loss",
    "init_generator",
    "label_probabilities",
    "load_generator",
    "median_bandwidth",
    "mmd_rbf",
    "mode_seeking_term",
    "moment_matching_term",
    "sample",
    "save_generator",
    "train_generator",
]
