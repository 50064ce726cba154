"""
Message-passing models: alternating propagation and transformation layers.

Each layer propagates with a fixed sparse operator, applies dropout in training
mode, then a linear map and (except for the last layer) a ReLU. The last linear
map doubles as the classifier over representations.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from bikt.core.errors import DimensionError, StructureError
from bikt.core.graph.models import Graph
from bikt.core.graph.normalize import identity_propagation, normalize_gcn, normalize_mean
from bikt.core.models.layers import BoundParams, ModelParams, PropagationKind
from bikt.core.tensor.matrix import Matrix, SparseCSR
from bikt.core.tensor.ops import add_bias, dropout, matmul, relu, softmax_rows, spmm, value_of
from bikt.core.tensor.tape import GradTape, Value


class Mode(str, Enum):
    TRAIN = "train"
    EVAL = "eval"


@dataclass(frozen=True, eq=False)
class Propagation:
    kind: PropagationKind
    operator: SparseCSR

    @property
    def n(self) -> int:
        return self.operator.shape[0]

    @classmethod
    def build(cls, kind: PropagationKind, graph: Graph) -> "Propagation":
        kind = PropagationKind(kind)
        if kind is PropagationKind.GCN_SYM:
            return cls(kind, normalize_gcn(graph))
        if kind is PropagationKind.MEAN:
            return cls(kind, normalize_mean(graph))
        return cls.identity(graph.n)

    @classmethod
    def identity(cls, n: int) -> "Propagation":
        return cls(PropagationKind.IDENTITY, identity_propagation(n))


@dataclass(frozen=True)
class ForwardOutput:
    representations: Value
    logits: Value
    probabilities: Value


def _resolve(
    params: ModelParams, tape: Optional[GradTape], bound: Optional[BoundParams]
) -> BoundParams:
    if bound is not None:
        return bound
    return params.bind(tape)


def _check_inputs(params: ModelParams, features: Matrix, operator: Optional[SparseCSR]) -> None:
    if features.ndim != 2 or features.shape[1] != params.in_dim:
        raise DimensionError(
            f"features of shape {features.shape} do not match input width {params.in_dim}"
        )
    n = features.shape[0]
    if operator is not None and operator.shape != (n, n):
        raise DimensionError(f"propagation operator {operator.shape} does not fit {n} nodes")


def _run_layers(
    params: ModelParams,
    operator: Optional[SparseCSR],
    features: Matrix,
    mode: Mode,
    bound: BoundParams,
    rng: Optional[np.random.Generator],
) -> ForwardOutput:
    mode = Mode(mode)
    if mode is Mode.TRAIN and rng is None and any(s.dropout_p > 0 for s in params.specs):
        raise ValueError("training mode with dropout needs a random generator")
    hidden: Value = features
    representations: Value = features
    last = params.num_layers - 1
    for index, spec in enumerate(params.specs):
        if operator is not None:
            hidden = spmm(operator, hidden)
        if mode is Mode.TRAIN:
            hidden = dropout(hidden, spec.dropout_p, rng)
        if index == last:
            representations = hidden
        hidden = add_bias(matmul(hidden, bound.weights[index]), bound.biases[index])
        if spec.has_activation:
            hidden = relu(hidden)
    return ForwardOutput(representations, hidden, softmax_rows(hidden))


def forward(
    params: ModelParams,
    operator: SparseCSR,
    features: Matrix,
    mode: Mode = Mode.EVAL,
    tape: Optional[GradTape] = None,
    rng: Optional[np.random.Generator] = None,
    bound: Optional[BoundParams] = None,
) -> ForwardOutput:
    """
    Forward pass of a message-passing model.

    Args:
        params: Model parameters
        operator: n x n propagation operator
        features: n x d input features
        mode: ``train`` applies dropout, ``eval`` does not
        tape: Record on this tape (parameters are watched as fresh leaves)
        rng: Dropout randomness, required in train mode
        bound: Pre-bound parameters; overrides ``tape`` binding

    Returns:
        Representations (classifier input), logits and class probabilities
    """
    _check_inputs(params, features, operator)
    return _run_layers(params, operator, features, mode, _resolve(params, tape, bound), rng)


def mlp_forward(
    params: ModelParams,
    features: Matrix,
    mode: Mode = Mode.EVAL,
    tape: Optional[GradTape] = None,
    rng: Optional[np.random.Generator] = None,
    bound: Optional[BoundParams] = None,
) -> ForwardOutput:
    """Forward pass with no propagation at all."""
    _check_inputs(params, features, None)
    return _run_layers(params, None, features, mode, _resolve(params, tape, bound), rng)


@dataclass(frozen=True, eq=False)
class MessagePassingModel:
    """Parameters paired with a propagation operator. Parameters are shared, not copied."""

    params: ModelParams
    propagation: Propagation

    @property
    def kind(self) -> PropagationKind:
        return self.propagation.kind

    @property
    def is_mlp(self) -> bool:
        return self.propagation.kind is PropagationKind.IDENTITY

    def forward(
        self,
        features: Matrix,
        mode: Mode = Mode.EVAL,
        tape: Optional[GradTape] = None,
        rng: Optional[np.random.Generator] = None,
        bound: Optional[BoundParams] = None,
    ) -> ForwardOutput:
        return forward(self.params, self.propagation.operator, features, mode, tape, rng, bound)

    def predict_proba(self, features: Matrix) -> Matrix:
        return value_of(self.forward(features, Mode.EVAL).probabilities)


def build_model(params: ModelParams, kind: PropagationKind, graph: Graph) -> MessagePassingModel:
    return MessagePassingModel(params, Propagation.build(kind, graph))


def derive_mlp(model: MessagePassingModel) -> MessagePassingModel:
    """Same parameter object, identity propagation."""
    if model.is_mlp:
        return model
    return MessagePassingModel(model.params, Propagation.identity(model.propagation.n))


def rebind(model: MessagePassingModel, graph: Graph) -> MessagePassingModel:
    """Same parameters and propagation kind, operator rebuilt on ``graph``."""
    return MessagePassingModel(model.params, Propagation.build(model.kind, graph))


@dataclass(frozen=True, eq=False)
class FeatureExtractor:
    """Layers 1..L-1 followed by the final propagation."""

    params: ModelParams

    @property
    def out_dim(self) -> int:
        return self.params.hidden_dim

    def __call__(
        self,
        features: Matrix,
        operator: SparseCSR,
        mode: Mode = Mode.EVAL,
        tape: Optional[GradTape] = None,
        rng: Optional[np.random.Generator] = None,
        bound: Optional[BoundParams] = None,
    ) -> Value:
        return forward(self.params, operator, features, mode, tape, rng, bound).representations


@dataclass(frozen=True, eq=False)
class Classifier:
    """The final linear layer, read live from the shared parameters."""

    params: ModelParams

    @property
    def in_dim(self) -> int:
        return self.params.hidden_dim

    @property
    def out_dim(self) -> int:
        return self.params.num_classes

    @property
    def weight(self) -> Matrix:
        return self.params.weights[-1]

    @property
    def bias(self) -> Matrix:
        return self.params.biases[-1]

    def __call__(self, representations: Value, bound: Optional[BoundParams] = None) -> Value:
        """Logits for ``representations``; pass ``bound`` to train the classifier."""
        width = value_of(representations).shape[1]
        if width != self.in_dim:
            raise DimensionError(f"classifier expects width {self.in_dim}, got {width}")
        weight = bound.weights[-1] if bound is not None else self.weight
        bias = bound.biases[-1] if bound is not None else self.bias
        return add_bias(matmul(representations, weight), bias)


def split_extractor_classifier(params: ModelParams) -> Tuple[FeatureExtractor, Classifier]:
    if params.num_layers < 2:
        raise StructureError("the extractor/classifier split needs at least two layers")
    return FeatureExtractor(params), Classifier(params)
