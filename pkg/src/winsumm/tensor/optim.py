"""AdaDelta and global-norm gradient clipping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from winsumm.tensor.core import Tensor


@dataclass
class AdaDeltaState:
    """Running averages E[g^2] and E[dx^2], one pair per parameter."""

    sq_grad: list[np.ndarray] = field(default_factory=list)
    sq_update: list[np.ndarray] = field(default_factory=list)
    rho: float = 0.95
    eps: float = 1e-6
    lr: float = 0.1

    @classmethod
    def for_params(cls, params: Sequence[Tensor], lr: float = 0.1, rho: float = 0.95,
                   eps: float = 1e-6) -> "AdaDeltaState":
        return cls([np.zeros_like(p.data) for p in params],
                   [np.zeros_like(p.data) for p in params], rho, eps, lr)


def adadelta_step(params: Sequence[Tensor], state: AdaDeltaState) -> None:
    """Update ``params`` in place from their ``.grad`` buffers.

    Parameters with no gradient buffer are treated as having zero gradient.
    """
    rho, eps = state.rho, state.eps
    for p, eg, ed in zip(params, state.sq_grad, state.sq_update):
        if p.grad is None:
            continue
        g = p.grad
        eg *= rho
        eg += (1.0 - rho) * g * g
        dx = -(np.sqrt(ed + eps) / np.sqrt(eg + eps)) * g
        ed *= rho
        ed += (1.0 - rho) * dx * dx
        p.data += state.lr * dx


def clip_grad_norm(params: Sequence[Tensor], max_norm: float = 5.0) -> float:
    """Rescale gradients so their global L2 norm is at most ``max_norm``.

    Returns the norm before clipping.
    """
    total = float(np.sqrt(np.sum([np.sum(p.grad * p.grad) for p in params if p.grad is not None])))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / total
        for p in params:
            if p.grad is not None:
                p.grad *= scale
    return total


def zero_grad(params: Sequence[Tensor]) -> None:
    for p in params:
        p.grad = None
