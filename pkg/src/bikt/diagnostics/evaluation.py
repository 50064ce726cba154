"""
Evaluation of model views: accuracy, correct sets, homophily breakdowns and
aggregation over seeds.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from bikt.core.errors import AggregationError, EvaluationError
from bikt.core.graph.homophily import homophily
from bikt.core.graph.models import Graph, HomophilyReport, SplitMasks
from bikt.core.models.network import MessagePassingModel, derive_mlp, rebind
from bikt.core.utils.metrics import MetricSummary, accuracy, argmax_rows, summarize

logger = logging.getLogger(__name__)

Subset = Union[str, Sequence[int], NDArray]


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Predictions over an evaluated node set."""

    nodes: NDArray[np.int64]
    predicted: NDArray[np.int64]
    labels: NDArray[np.int64]

    @property
    def correct(self) -> NDArray[np.int64]:
        """Ids of correctly predicted nodes (sorted)."""
        return np.sort(self.nodes[self.predicted == self.labels])

    @property
    def accuracy(self) -> float:
        return accuracy(self.predicted, self.labels)

    def restrict(self, nodes: NDArray) -> "PredictionSet":
        keep = np.isin(self.nodes, nodes)
        return PredictionSet(self.nodes[keep], self.predicted[keep], self.labels[keep])


class EvalReport(BaseModel):
    """Accuracy of one model view; subset accuracies are None for empty subsets."""

    accuracy: float = Field(ge=0, le=1)
    assortative_accuracy: Optional[float] = None
    disassortative_accuracy: Optional[float] = None
    middle_accuracy: Optional[float] = None
    per_class_accuracy: List[Optional[float]] = Field(default_factory=list)
    n_evaluated: int = 0
    n_assortative: int = 0
    n_disassortative: int = 0
    n_middle: int = 0

    def metrics(self) -> Dict[str, Optional[float]]:
        """Flat metric map used for aggregation."""
        flat = {
            "accuracy": self.accuracy,
            "assortative_accuracy": self.assortative_accuracy,
            "disassortative_accuracy": self.disassortative_accuracy,
            "middle_accuracy": self.middle_accuracy,
        }
        for cls, value in enumerate(self.per_class_accuracy):
            flat[f"class_{cls}_accuracy"] = value
        return flat


def _subset_nodes(masks: SplitMasks, subset: Subset) -> NDArray[np.int64]:
    if isinstance(subset, str):
        if subset not in ("train", "val", "test"):
            raise EvaluationError(f"unknown subset '{subset}'")
        return masks.indices(subset)
    return np.unique(np.asarray(subset, dtype=np.int64))


def _subset_accuracy(pred: PredictionSet, nodes: NDArray) -> Tuple[Optional[float], int]:
    part = pred.restrict(nodes)
    if part.nodes.size == 0:
        return None, 0
    return part.accuracy, int(part.nodes.size)


def build_report(
    pred: PredictionSet, num_classes: int, report: Optional[HomophilyReport] = None
) -> EvalReport:
    per_class = []
    for cls in range(num_classes):
        value, _ = _subset_accuracy(pred, pred.nodes[pred.labels == cls])
        per_class.append(value)
    fields = {}
    if report is not None:
        for name, nodes in (
            ("assortative", report.assortative),
            ("disassortative", report.disassortative),
            ("middle", report.middle),
        ):
            value, count = _subset_accuracy(pred, nodes)
            fields[f"{name}_accuracy"] = value
            fields[f"n_{name}"] = count
    return EvalReport(
        accuracy=pred.accuracy,
        per_class_accuracy=per_class,
        n_evaluated=int(pred.nodes.size),
        **fields,
    )


def predict(model: MessagePassingModel, graph: Graph, nodes: NDArray) -> PredictionSet:
    """Argmax predictions (ties to the lowest class) for ``nodes``."""
    if not model.is_mlp and model.propagation.n != graph.n:
        raise EvaluationError("model propagation does not match the evaluation graph")
    predicted = argmax_rows(model.predict_proba(graph.features))
    return PredictionSet(nodes, predicted[nodes], graph.labels[nodes])


def eval_model(
    model: MessagePassingModel,
    graph: Graph,
    masks: SplitMasks,
    subset: Subset = "test",
    homophily_report: Optional[HomophilyReport] = None,
) -> Tuple[PredictionSet, EvalReport]:
    """
    Evaluate a model view on the full ``graph``.

    Graph views are rebuilt on ``graph``, so inductive runs see the edges of
    nodes hidden during training.

    Raises:
        EvaluationError: If the subset is empty
    """
    nodes = _subset_nodes(masks, subset)
    if nodes.size == 0:
        raise EvaluationError("cannot evaluate an empty node subset")
    view = model if model.is_mlp else rebind(model, graph)
    pred = predict(view, graph, nodes)
    report = homophily_report if homophily_report is not None else homophily(graph)
    return pred, build_report(pred, graph.num_classes, report)


def mlp_share_eval(
    model: MessagePassingModel, graph: Graph, masks: SplitMasks, subset: Subset = "test"
) -> EvalReport:
    """Evaluate the trained GNN's parameters with identity propagation, no retraining."""
    return eval_model(derive_mlp(model), graph, masks, subset)[1]


def union_intersection(a: PredictionSet, b: PredictionSet) -> Tuple[float, float]:
    """
    Accuracy of the union and of the intersection of two correct sets.

    Raises:
        EvaluationError: If the evaluated node sets differ
    """
    if not np.array_equal(np.sort(a.nodes), np.sort(b.nodes)):
        raise EvaluationError("prediction sets cover different nodes")
    total = a.nodes.size
    if total == 0:
        raise EvaluationError("cannot combine empty prediction sets")
    union = np.union1d(a.correct, b.correct).size / total
    intersection = np.intersect1d(a.correct, b.correct).size / total
    return float(union), float(intersection)


def assortativity_eval(
    pred: PredictionSet, report: HomophilyReport, num_classes: Optional[int] = None
) -> EvalReport:
    """Accuracy over assortative, disassortative and middle-band evaluated nodes."""
    if num_classes is None:
        num_classes = int(pred.labels.max()) + 1 if pred.labels.size else 0
    return build_report(pred, num_classes, report)


def aggregate_runs(
    reports: Sequence[Union[EvalReport, Mapping[str, Optional[float]]]]
) -> Dict[str, Optional[MetricSummary]]:
    """
    Mean and sample standard deviation of every metric across runs.

    Metrics undefined in some runs are aggregated over the runs defining them.

    Raises:
        AggregationError: If runs report different metric names
    """
    if not reports:
        raise AggregationError("no reports to aggregate")
    flat = [r.metrics() if isinstance(r, EvalReport) else dict(r) for r in reports]
    keys = list(flat[0])
    for index, item in enumerate(flat[1:], start=1):
        if set(item) != set(keys):
            raise AggregationError(
                f"report {index} has metrics {sorted(item)}, expected {sorted(keys)}"
            )
    return {key: summarize([item[key] for item in flat]) for key in keys}
