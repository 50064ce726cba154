"""
Evaluation and investigation of model views.
"""

from bikt.diagnostics.evaluation import (
    EvalReport,
    PredictionSet,
    aggregate_runs,
    assortativity_eval,
    build_report,
    eval_model,
    mlp_share_eval,
    predict,
    union_intersection,
)
from bikt.diagnostics.investigation import Investigation, investigate, train_mlp_re

__all__ = [
    "EvalReport",
    "Investigation",
    "PredictionSet",
    "aggregate_runs",
    "assortativity_eval",
    "build_report",
    "eval_model",
    "investigate",
    "mlp_share_eval",
    "predict",
    "train_mlp_re",
    "union_intersection",
]
