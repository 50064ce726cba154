"""
Binary parameter checkpoints.

Little-endian layout: magic (4 bytes), version u32, layer count u32, then per
layer rows u32, cols u32, row-major f64 weights and f64 biases.
"""

import struct
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from bikt.core.errors import StructureError
from bikt.core.models.layers import LayerSpec, ModelParams
from bikt.core.tensor.matrix import Matrix

MODEL_MAGIC = b"BIKT"
GENERATOR_MAGIC = b"BIKG"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sII")
_SHAPE = struct.Struct("<II")


def write_layers(
    path: Union[str, Path], weights: Sequence[Matrix], biases: Sequence[Matrix],
    magic: bytes = MODEL_MAGIC,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(magic, FORMAT_VERSION, len(weights)))
        for weight, bias in zip(weights, biases):
            rows, cols = weight.shape
            handle.write(_SHAPE.pack(rows, cols))
            handle.write(np.ascontiguousarray(weight, dtype="<f8").tobytes())
            handle.write(np.ascontiguousarray(bias, dtype="<f8").reshape(-1).tobytes())
    return path


def read_layers(
    path: Union[str, Path], magic: bytes = MODEL_MAGIC
) -> Tuple[List[Matrix], List[Matrix]]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise StructureError(f"{path}: truncated checkpoint header")
    found, version, layers = _HEADER.unpack_from(data, 0)
    if found != magic:
        raise StructureError(f"{path}: expected magic {magic!r}, found {found!r}")
    if version != FORMAT_VERSION:
        raise StructureError(f"{path}: unsupported checkpoint version {version}")
    offset = _HEADER.size
    weights, biases = [], []
    try:
        for _ in range(layers):
            rows, cols = _SHAPE.unpack_from(data, offset)
            offset += _SHAPE.size
            weight = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=offset)
            offset += 8 * rows * cols
            bias = np.frombuffer(data, dtype="<f8", count=cols, offset=offset)
            offset += 8 * cols
            weights.append(weight.reshape(rows, cols).astype(np.float64))
            biases.append(bias.reshape(1, cols).astype(np.float64))
    except (struct.error, ValueError):
        raise StructureError(f"{path}: truncated checkpoint body")
    if offset != len(data):
        raise StructureError(f"{path}: {len(data) - offset} trailing bytes after the last layer")
    return weights, biases


def save_params(params: ModelParams, path: Union[str, Path]) -> Path:
    return write_layers(path, params.weights, params.biases, MODEL_MAGIC)


def load_params(
    path: Union[str, Path], specs: Optional[Sequence[LayerSpec]] = None
) -> ModelParams:
    """
    Read model parameters.

    Layer activations and dropout are not stored; without ``specs`` every layer but
    the last gets a ReLU and dropout is zero.
    """
    weights, biases = read_layers(path, MODEL_MAGIC)
    if specs is None:
        last = len(weights) - 1
        specs = [
            LayerSpec(w.shape[0], w.shape[1], has_activation=i < last)
            for i, w in enumerate(weights)
        ]
    return ModelParams(tuple(specs), weights, biases)
