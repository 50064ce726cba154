"""
Metrics calculation utilities.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import statistics

import numpy as np
from numpy.typing import NDArray


def calculate_mean(values: List[float]) -> float:
    """Calculate mean of values."""
    return statistics.mean(values) if values else 0.0


def calculate_std_dev(values: List[float]) -> float:
    """Calculate sample (n - 1) standard deviation."""
    return statistics.stdev(values) if len(values) > 1 else 0.0


def argmax_rows(probabilities: NDArray) -> NDArray[np.int64]:
    """Predicted class per row; ties go to the lowest class index."""
    return np.argmax(np.asarray(probabilities), axis=1).astype(np.int64)


def accuracy(predicted: NDArray, labels: NDArray) -> float:
    """
    Fraction of matching entries.

    Args:
        predicted: Predicted labels
        labels: True labels

    Returns:
        Accuracy in [0, 1]; 0.0 for empty input
    """
    predicted = np.asarray(predicted)
    if predicted.size == 0:
        return 0.0
    return float(np.mean(predicted == np.asarray(labels)))


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    n: int

    def format(self, digits: int = 4) -> str:
        return f"{self.mean:.{digits}f} ± {self.std:.{digits}f}"


def summarize(values: Sequence[Optional[float]]) -> Optional[MetricSummary]:
    """
    Mean and sample standard deviation of the defined values.

    Returns:
        Summary, or None if no value is defined
    """
    present = [float(v) for v in values if v is not None]
    if not present:
        return None
    return MetricSummary(calculate_mean(present), calculate_std_dev(present), len(present))
