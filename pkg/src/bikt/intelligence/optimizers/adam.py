"""
Adam with L2 weight decay.
"""

from typing import List, Sequence, Tuple

import numpy as np

from bikt.core.errors import DimensionError
from bikt.core.tensor.matrix import Matrix


class Adam:
    """
    Adam optimizer updating parameter arrays in place.

    Weight decay is added to the gradient (``grad + weight_decay * param``)
    before the moment updates.
    """

    def __init__(
        self,
        params: Sequence[Matrix],
        lr: float = 1e-3,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        if weight_decay < 0:
            raise ValueError(f"weight decay must be nonnegative, got {weight_decay}")
        self.params: List[Matrix] = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self._m = [np.zeros_like(p) for p in self.params]
        self._v = [np.zeros_like(p) for p in self.params]

    def step(self, grads: Sequence[Matrix]) -> None:
        if len(grads) != len(self.params):
            raise DimensionError(f"expected {len(self.params)} gradients, got {len(grads)}")
        self.step_count += 1
        correction1 = 1.0 - self.beta1 ** self.step_count
        correction2 = 1.0 - self.beta2 ** self.step_count
        for param, grad, m, v in zip(self.params, grads, self._m, self._v):
            if grad.shape != param.shape:
                raise DimensionError(f"gradient {grad.shape} does not match parameter {param.shape}")
            if self.weight_decay:
                grad = grad + self.weight_decay * param
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            param -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
