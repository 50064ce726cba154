"""
Reverse-mode gradient tape.

A tape records primitive applications in execution order. ``gradient`` replays
them backwards, visiting every entry once.
"""

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from bikt.core.errors import DimensionError
from bikt.core.tensor.matrix import Matrix

BackwardFn = Callable[[Matrix, Dict[str, Any]], Tuple[Optional[Matrix], ...]]


@dataclass(frozen=True, eq=False)
class Node:
    """A value produced on a tape."""

    tape: "GradTape"
    id: int
    value: Matrix

    @property
    def shape(self) -> tuple:
        return self.value.shape


Value = Union[Node, Matrix]


@dataclass
class TapeEntry:
    op: str
    inputs: Tuple[Optional[int], ...]
    output: int
    saved: Dict[str, Any]
    backward: BackwardFn


@dataclass
class GradTape:
    """
    Ordered record of primitive applications.

    A tape belongs to a single thread; independent tapes may be used in parallel.
    """

    entries: List[TapeEntry] = field(default_factory=list)
    _ids: Any = field(default_factory=itertools.count, repr=False)

    def watch(self, value: Matrix) -> Node:
        """Register a leaf value whose gradient may be requested."""
        return Node(self, next(self._ids), np.asarray(value, dtype=np.float64))

    def record(
        self,
        op: str,
        inputs: Sequence[Value],
        value: Matrix,
        backward: BackwardFn,
        saved: Optional[Dict[str, Any]] = None,
    ) -> Node:
        input_ids = []
        for item in inputs:
            if isinstance(item, Node):
                if item.tape is not self:
                    raise ValueError(f"{op}: input recorded on a different tape")
                input_ids.append(item.id)
            else:
                input_ids.append(None)
        output = Node(self, next(self._ids), value)
        self.entries.append(TapeEntry(op, tuple(input_ids), output.id, saved or {}, backward))
        return output

    def gradient(self, target: Node, sources: Sequence[Node]) -> List[Matrix]:
        """
        Gradients of a scalar (1x1) target with respect to ``sources``.

        Sources that do not influence the target get all-zero gradients.
        """
        if target.shape != (1, 1):
            raise DimensionError(f"gradient target must be 1x1, got {target.shape}")
        grads: Dict[int, Matrix] = {target.id: np.ones((1, 1))}
        for entry in reversed(self.entries):
            upstream = grads.get(entry.output)
            if upstream is None:
                continue
            for input_id, grad in zip(entry.inputs, entry.backward(upstream, entry.saved)):
                if input_id is None or grad is None:
                    continue
                if input_id in grads:
                    grads[input_id] = grads[input_id] + grad
                else:
                    grads[input_id] = grad
        return [grads.get(source.id, np.zeros_like(source.value)) for source in sources]
