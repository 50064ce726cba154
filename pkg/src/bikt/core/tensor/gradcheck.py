"""
Finite-difference verification of tape gradients.
"""

from typing import Callable, List, Sequence

import numpy as np

from bikt.core.errors import EvaluationError
from bikt.core.tensor.matrix import Matrix
from bikt.core.tensor.ops import scalar
from bikt.core.tensor.tape import GradTape, Node, Value


def _evaluate(f: Callable[[List[Value]], Value], params: List[Matrix]) -> float:
    result = scalar(f(params))
    if not np.isfinite(result):
        raise EvaluationError("function under check returned a non-finite value")
    return result


def grad_check(
    f: Callable[[List[Value]], Value], params: Sequence[Matrix], step: float = 1e-6
) -> float:
    """
    Compare tape gradients of a scalar function with central differences.

    Args:
        f: Maps a list of parameter values (nodes or arrays) to a 1x1 value
        params: Point at which to check
        step: Finite-difference step, in (0, 1e-3]

    Returns:
        Max over entries of |analytic - numeric| / max(1, |analytic|, |numeric|)
    """
    if not 0.0 < step <= 1e-3:
        raise ValueError(f"step must be in (0, 1e-3], got {step}")
    base = [np.array(p, dtype=np.float64) for p in params]

    tape = GradTape()
    nodes = [tape.watch(p.copy()) for p in base]
    out = f(nodes)
    if not np.isfinite(scalar(out)):
        raise EvaluationError("function under check returned a non-finite value")
    if isinstance(out, Node):
        analytic = tape.gradient(out, nodes)
    else:
        analytic = [np.zeros_like(p) for p in base]

    worst = 0.0
    for k, param in enumerate(base):
        for index in np.ndindex(param.shape):
            shifted = [p.copy() for p in base]
            shifted[k][index] = param[index] + step
            upper = _evaluate(f, shifted)
            shifted[k][index] = param[index] - step
            lower = _evaluate(f, shifted)
            numeric = (upper - lower) / (2.0 * step)
            exact = float(analytic[k][index])
            error = abs(exact - numeric) / max(1.0, abs(exact), abs(numeric))
            worst = max(worst, error)
    return worst
