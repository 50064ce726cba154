"""
Loss terms of the BiKT objectives.
"""

from typing import Optional

import numpy as np
from numpy.typing import NDArray

from bikt.core.models.layers import BoundParams
from bikt.core.models.network import Classifier
from bikt.core.tensor.matrix import Matrix
from bikt.core.tensor.ops import kl_div_rows, softmax_cross_entropy, take_rows
from bikt.core.tensor.tape import Value
from bikt.intelligence.generator.generator import GenBatch


def supervised_loss(logits: Value, labels: NDArray, nodes: NDArray) -> Value:
    """Mean cross-entropy over ``nodes``."""
    return softmax_cross_entropy(take_rows(logits, nodes), np.asarray(labels)[nodes])


def knowledge_infusion_loss(
    batch: GenBatch, classifier: Classifier, bound: Optional[BoundParams] = None
) -> Value:
    """
    Mean cross-entropy of the classifier on generated (sample, label) pairs.

    Samples are constants, so only the classifier (when bound) receives gradients.
    """
    return softmax_cross_entropy(classifier(batch.samples, bound), batch.labels)


def pseudo_supervision_loss(target_probs: Matrix, probs: Value, nodes: NDArray) -> Value:
    """KL(target || probs) averaged over ``nodes``; the target is fixed."""
    return kl_div_rows(np.asarray(target_probs)[nodes], take_rows(probs, nodes))
