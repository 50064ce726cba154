"""
Differentiable primitive operations.

Every op accepts tape nodes or plain arrays. When at least one input is a node
the application is recorded on that node's tape and a node is returned;
otherwise the plain value is returned and nothing is recorded.
"""

from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from bikt.core.errors import DimensionError, LabelRangeError
from bikt.core.tensor.matrix import Matrix, SparseCSR
from bikt.core.tensor.tape import BackwardFn, GradTape, Node, Value

PROB_FLOOR = 1e-12
LOG_PROB_FLOOR = float(np.log(PROB_FLOOR))


def value_of(item: Value) -> Matrix:
    """Underlying array of a node or array."""
    return item.value if isinstance(item, Node) else np.asarray(item, dtype=np.float64)


def scalar(item: Value) -> float:
    """Read a 1x1 value as a Python float."""
    return float(value_of(item)[0, 0])


def _tape_of(inputs: Sequence[Value]) -> Optional[GradTape]:
    tape = None
    for item in inputs:
        if isinstance(item, Node):
            if tape is not None and item.tape is not tape:
                raise ValueError("inputs belong to different tapes")
            tape = item.tape
    return tape


def _emit(
    op: str,
    inputs: Sequence[Value],
    value: Matrix,
    backward: BackwardFn,
    saved: Optional[Dict[str, Any]] = None,
) -> Value:
    tape = _tape_of(inputs)
    if tape is None:
        return value
    return tape.record(op, inputs, value, backward, saved)


def _same_shape(op: str, a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ")


def _check_labels(labels: NDArray, rows: int, classes: int) -> NDArray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.shape[0] != rows:
        raise DimensionError(f"expected {rows} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise LabelRangeError(f"labels must lie in [0, {classes})")
    return labels


def _row_weights(weights: Optional[NDArray], rows: int) -> NDArray:
    if weights is None:
        return np.full(rows, 1.0 / rows)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (rows,):
        raise DimensionError(f"expected {rows} row weights, got shape {weights.shape}")
    return weights / weights.sum()


def matmul(a: Value, b: Value) -> Value:
    av, bv = value_of(a), value_of(b)
    if av.ndim != 2 or bv.ndim != 2 or av.shape[1] != bv.shape[0]:
        raise DimensionError(f"matmul: cannot multiply {av.shape} by {bv.shape}")
    return _emit(
        "matmul",
        (a, b),
        av @ bv,
        lambda g, s: (g @ s["b"].T, s["a"].T @ g),
        {"a": av, "b": bv},
    )


def spmm(s: SparseCSR, m: Value) -> Value:
    """Sparse-dense product; the sparse operand is a constant."""
    mv = value_of(m)
    if s.shape[1] != mv.shape[0]:
        raise DimensionError(f"spmm: cannot multiply sparse {s.shape} by {mv.shape}")
    out = np.asarray(s @ mv, dtype=np.float64)
    return _emit("spmm", (m,), out, lambda g, saved: (np.asarray(saved["s"].T @ g),), {"s": s})


def relu(m: Value) -> Value:
    mv = value_of(m)
    mask = mv > 0
    return _emit("relu", (m,), np.where(mask, mv, 0.0), lambda g, s: (g * s["mask"],), {"mask": mask})


def add(a: Value, b: Value) -> Value:
    av, bv = value_of(a), value_of(b)
    _same_shape("add", av, bv)
    return _emit("add", (a, b), av + bv, lambda g, s: (g, g))


def sub(a: Value, b: Value) -> Value:
    av, bv = value_of(a), value_of(b)
    _same_shape("sub", av, bv)
    return _emit("sub", (a, b), av - bv, lambda g, s: (g, -g))


def add_bias(m: Value, b: Value) -> Value:
    mv, bv = value_of(m), value_of(b)
    if bv.shape != (1, mv.shape[1]):
        raise DimensionError(f"add_bias: bias {bv.shape} does not fit {mv.shape}")
    return _emit("add_bias", (m, b), mv + bv, lambda g, s: (g, g.sum(axis=0, keepdims=True)))


def concat_cols(a: Value, b: Value) -> Value:
    av, bv = value_of(a), value_of(b)
    if av.shape[0] != bv.shape[0]:
        raise DimensionError(f"concat_cols: row counts {av.shape[0]} and {bv.shape[0]} differ")
    split = av.shape[1]
    return _emit(
        "concat_cols",
        (a, b),
        np.concatenate([av, bv], axis=1),
        lambda g, s: (g[:, : s["split"]], g[:, s["split"]:]),
        {"split": split},
    )


def scale(m: Value, c: float) -> Value:
    c = float(c)
    return _emit("scale", (m,), value_of(m) * c, lambda g, s: (g * s["c"],), {"c": c})


def mul_const(m: Value, c: Matrix) -> Value:
    """Elementwise product with a constant matrix."""
    mv, cv = value_of(m), np.asarray(c, dtype=np.float64)
    _same_shape("mul_const", mv, cv)
    return _emit("mul_const", (m,), mv * cv, lambda g, s: (g * s["c"],), {"c": cv})


def scale_rows(m: Value, w: NDArray) -> Value:
    """Multiply row i by the constant ``w[i]``."""
    mv = value_of(m)
    column = np.asarray(w, dtype=np.float64).reshape(-1, 1)
    if column.shape[0] != mv.shape[0]:
        raise DimensionError(f"scale_rows: {column.shape[0]} weights for {mv.shape[0]} rows")
    return _emit("scale_rows", (m,), mv * column, lambda g, s: (g * s["w"],), {"w": column})


def abs_(m: Value) -> Value:
    mv = value_of(m)
    sign = np.sign(mv)
    return _emit("abs", (m,), np.abs(mv), lambda g, s: (g * s["sign"],), {"sign": sign})


def sum_all(m: Value) -> Value:
    mv = value_of(m)
    shape = mv.shape
    return _emit(
        "sum_all",
        (m,),
        np.array([[mv.sum()]]),
        lambda g, s: (np.full(s["shape"], g[0, 0]),),
        {"shape": shape},
    )


def take_rows(m: Value, index: NDArray) -> Value:
    mv = value_of(m)
    index = np.asarray(index, dtype=np.int64)

    def backward(g: Matrix, s: Dict[str, Any]):
        grad = np.zeros(s["shape"])
        np.add.at(grad, s["index"], g)
        return (grad,)

    return _emit("take_rows", (m,), mv[index], backward, {"index": index, "shape": mv.shape})


def dropout(m: Value, p: float, rng: np.random.Generator) -> Value:
    """Inverted dropout with keep probability ``1 - p``; ``p == 0`` is the identity."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if p == 0.0:
        return m
    mv = value_of(m)
    mask = (rng.random(mv.shape) >= p) / (1.0 - p)
    return _emit("dropout", (m,), mv * mask, lambda g, s: (g * s["mask"],), {"mask": mask})


def softmax_rows(m: Value) -> Value:
    mv = value_of(m)
    if mv.shape[1] < 1:
        raise DimensionError("softmax_rows needs at least one column")
    exp = np.exp(mv - mv.max(axis=1, keepdims=True))
    probs = exp / exp.sum(axis=1, keepdims=True)

    def backward(g: Matrix, s: Dict[str, Any]):
        p = s["p"]
        return (p * (g - (g * p).sum(axis=1, keepdims=True)),)

    return _emit("softmax_rows", (m,), probs, backward, {"p": probs})


def softmax_cross_entropy(
    logits: Value, labels: NDArray, row_weights: Optional[NDArray] = None
) -> Value:
    """
    Mean cross-entropy of softmax(logits) against integer labels.

    The gradient is the fused ``(softmax - onehot)`` form, scaled by the row weights.
    Rows whose label probability is floored at 1e-12 contribute a constant and get
    zero gradient.
    With ``row_weights`` the mean is ``sum(w * loss) / sum(w)``.
    """
    lv = value_of(logits)
    rows, classes = lv.shape
    if rows == 0:
        raise DimensionError("softmax_cross_entropy needs at least one row")
    labels = _check_labels(labels, rows, classes)
    weights = _row_weights(row_weights, rows)

    shifted = lv - lv.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    raw = log_probs[np.arange(rows), labels]
    picked = np.maximum(raw, LOG_PROB_FLOOR)
    loss = np.array([[-(weights * picked).sum()]])

    def backward(g: Matrix, s: Dict[str, Any]):
        grad = np.exp(s["log_probs"])
        grad[np.arange(grad.shape[0]), s["labels"]] -= 1.0
        grad[s["floored"]] = 0.0
        return (grad * s["weights"][:, None] * g[0, 0],)

    return _emit(
        "softmax_cross_entropy",
        (logits,),
        loss,
        backward,
        {
            "log_probs": log_probs,
            "labels": labels,
            "weights": weights,
            "floored": raw < LOG_PROB_FLOOR,
        },
    )


def cross_entropy(
    probs: Matrix, labels: NDArray, row_weights: Optional[NDArray] = None
) -> float:
    """Mean ``-ln probs[i, labels[i]]`` with probabilities floored at 1e-12."""
    pv = value_of(probs)
    rows, classes = pv.shape
    labels = _check_labels(labels, rows, classes)
    weights = _row_weights(row_weights, rows)
    picked = np.maximum(pv[np.arange(rows), labels], PROB_FLOOR)
    return float(-(weights * np.log(picked)).sum())


def kl_div_rows(p: Union[Matrix, Node], q: Value) -> Value:
    """
    Mean over rows of KL(p || q).

    ``p`` is a fixed target: no gradient flows into it. Both sides are floored at
    1e-12 inside the logarithm and ``0 * ln 0`` counts as 0.
    """
    pv, qv = value_of(p), value_of(q)
    _same_shape("kl_div_rows", pv, qv)
    rows = pv.shape[0]
    q_floored = np.maximum(qv, PROB_FLOOR)
    positive = pv > 0
    log_ratio = np.log(np.maximum(pv, PROB_FLOOR)) - np.log(q_floored)
    terms = np.where(positive, pv * log_ratio, 0.0)
    value = np.array([[terms.sum() / rows]])

    def backward(g: Matrix, s: Dict[str, Any]):
        grad = -s["p"] / s["q"] / s["rows"]
        grad = np.where(s["active"], grad, 0.0)
        return (grad * g[0, 0],)

    saved = {"p": pv, "q": q_floored, "rows": rows, "active": qv > PROB_FLOOR}
    return _emit("kl_div_rows", (q,), value, backward, saved)
