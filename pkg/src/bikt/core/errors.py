"""
Exception hierarchy for BiKT.

Every error derives from ``ValueError`` through ``BiktError`` so callers that only
care about "bad input" can keep catching ``ValueError``.
"""

from typing import Optional


class BiktError(ValueError):
    """Base class for all BiKT errors."""


class DimensionError(BiktError):
    """Operand shapes are incompatible."""


class LabelRangeError(BiktError, IndexError):
    """A class label lies outside ``[0, num_classes)``."""


class GraphParseError(BiktError):
    """A dataset file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NodeRangeError(BiktError):
    """A node id is outside the node range of the graph."""


class ConsistencyError(BiktError):
    """Dataset files disagree with each other (e.g. row counts)."""


class StratificationError(BiktError):
    """Stratified splitting is impossible for the given graph."""


class StructureError(BiktError):
    """A model does not have the structure an operation needs."""


class BiktConfigurationError(BiktError):
    """An experiment or training configuration is unusable."""


class TrainingError(BiktError):
    """Optimization diverged or produced a non-finite loss."""

    def __init__(self, message: str, phase: Optional[str] = None, epoch: Optional[int] = None):
        self.phase = phase
        self.epoch = epoch
        context = []
        if phase is not None:
            context.append(f"phase {phase}")
        if epoch is not None:
            context.append(f"epoch {epoch}")
        if context:
            message = f"{message} ({', '.join(context)})"
        super().__init__(message)


class EvaluationError(BiktError):
    """An evaluation request cannot be answered."""


class AggregationError(BiktError):
    """Run reports cannot be aggregated together."""


class SampleSizeError(BiktError):
    """Too few samples for a statistical estimate."""
