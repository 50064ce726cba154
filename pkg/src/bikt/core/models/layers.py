"""
Layer specifications and the parameter container shared by a GNN and its MLP view.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bikt.core.errors import DimensionError, StructureError
from bikt.core.tensor.matrix import Matrix
from bikt.core.tensor.tape import GradTape, Value


class PropagationKind(str, Enum):
    """Feature propagation operators."""

    GCN_SYM = "gcn"
    MEAN = "mean"
    IDENTITY = "identity"


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    has_activation: bool = True
    dropout_p: float = 0.0

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise DimensionError(f"layer dimensions must be positive, got {self.in_dim}x{self.out_dim}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p}")


@dataclass(frozen=True)
class Architecture:
    """Depth, width, propagation and dropout of a message-passing model."""

    layers: int = 2
    hidden: int = 64
    propagation: PropagationKind = PropagationKind.GCN_SYM
    dropout: float = 0.5

    def layer_specs(self, in_dim: int, num_classes: int) -> List[LayerSpec]:
        return build_layer_specs(in_dim, self.hidden, num_classes, self.layers, self.dropout)


def build_layer_specs(
    in_dim: int, hidden: int, num_classes: int, layers: int, dropout: float = 0.0
) -> List[LayerSpec]:
    """Chained specs: ``layers - 1`` hidden ReLU layers, then a linear output layer."""
    if layers < 1:
        raise StructureError(f"a model needs at least one layer, got {layers}")
    dims = [in_dim] + [hidden] * (layers - 1) + [num_classes]
    return [
        LayerSpec(dims[i], dims[i + 1], has_activation=i < layers - 1, dropout_p=dropout)
        for i in range(layers)
    ]


@dataclass(frozen=True)
class BoundParams:
    """Parameters as seen by one forward pass: tape nodes, or plain arrays."""

    weights: Tuple[Value, ...]
    biases: Tuple[Value, ...]

    def nodes(self) -> List[Value]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out


@dataclass(eq=False)
class ModelParams:
    """
    Per-layer weights (in x out) and bias rows (1 x out).

    Updates happen in place so every model holding this object sees them.
    """

    specs: Tuple[LayerSpec, ...]
    weights: List[Matrix]
    biases: List[Matrix]

    def __post_init__(self):
        self.specs = tuple(self.specs)
        if not self.specs:
            raise StructureError("parameters need at least one layer")
        if self.specs[-1].has_activation:
            raise StructureError("the final layer must not have an activation")
        for prev, nxt in zip(self.specs, self.specs[1:]):
            if prev.out_dim != nxt.in_dim:
                raise DimensionError(f"layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}")
        if len(self.weights) != len(self.specs) or len(self.biases) != len(self.specs):
            raise StructureError("one weight and one bias per layer are required")
        for spec, w, b in zip(self.specs, self.weights, self.biases):
            if w.shape != (spec.in_dim, spec.out_dim) or b.shape != (1, spec.out_dim):
                raise DimensionError(
                    f"expected weight {(spec.in_dim, spec.out_dim)} and bias {(1, spec.out_dim)}, "
                    f"got {w.shape} and {b.shape}"
                )

    @property
    def num_layers(self) -> int:
        return len(self.specs)

    @property
    def in_dim(self) -> int:
        return self.specs[0].in_dim

    @property
    def num_classes(self) -> int:
        return self.specs[-1].out_dim

    @property
    def hidden_dim(self) -> int:
        """Width of the classifier input."""
        return self.specs[-1].in_dim

    def tensors(self) -> List[Matrix]:
        """All parameter arrays in [W0, b0, W1, b1, ...] order (live references)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def bind(self, tape: Optional[GradTape] = None) -> BoundParams:
        if tape is None:
            return BoundParams(tuple(self.weights), tuple(self.biases))
        return BoundParams(
            tuple(tape.watch(w) for w in self.weights),
            tuple(tape.watch(b) for b in self.biases),
        )

    def snapshot(self) -> "ModelParams":
        return ModelParams(self.specs, [w.copy() for w in self.weights],
                           [b.copy() for b in self.biases])

    def load_(self, other: "ModelParams") -> None:
        """Copy values from ``other`` into this object's arrays."""
        for dst, src in zip(self.tensors(), other.tensors()):
            if dst.shape != src.shape:
                raise DimensionError(f"cannot load {src.shape} into {dst.shape}")
            np.copyto(dst, src)

    def equals(self, other: "ModelParams") -> bool:
        """Bit-identical values."""
        return len(self.tensors()) == len(other.tensors()) and all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.tensors(), other.tensors())
        )


def init_params(specs: Sequence[LayerSpec], seed: int) -> ModelParams:
    """Glorot-uniform weights within +-sqrt(6 / (in + out)) and zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for spec in specs:
        bound = np.sqrt(6.0 / (spec.in_dim + spec.out_dim))
        weights.append(rng.uniform(-bound, bound, size=(spec.in_dim, spec.out_dim)))
        biases.append(np.zeros((1, spec.out_dim)))
    return ModelParams(tuple(specs), weights, biases)
