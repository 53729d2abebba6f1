"""Central finite-difference check of tape gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from winsumm.tensor.core import Tape, Tensor


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(1e-8, abs(analytic) + abs(numeric))


def grad_check_report(f: Callable[[], Tensor], params: Sequence[Tensor], step: float = 1e-5,
                      samples: int = 25, seed: int = 0) -> dict[str, float]:
    """Max relative error per parameter tensor.

    ``f`` recomputes the scalar loss from the current parameter values. Tensors
    with more than ``samples`` entries are checked at ``samples`` random
    coordinates.
    """
    for p in params:
        p.grad = None
    with Tape() as tape:
        loss = f()
    tape.backward(loss)
    analytic = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]

    rng = np.random.default_rng(seed)
    report = {}
    for k, (p, ga) in enumerate(zip(params, analytic)):
        flat = p.data.reshape(-1)
        coords = np.arange(flat.size) if flat.size <= samples else rng.choice(flat.size, samples, replace=False)
        worst = 0.0
        for j in coords:
            orig = flat[j]
            flat[j] = orig + step
            up = f().item()
            flat[j] = orig - step
            down = f().item()
            flat[j] = orig
            numeric = (up - down) / (2 * step)
            worst = max(worst, relative_error(float(ga.reshape(-1)[j]), numeric))
        report[p.name or f"param{k}"] = worst
    return report


def grad_check(f: Callable[[], Tensor], params: Sequence[Tensor], step: float = 1e-5,
               samples: int = 25, seed: int = 0) -> float:
    """Maximum relative error between tape gradients and central differences."""
    report = grad_check_report(f, params, step, samples, seed)
    return max(report.values(), default=0.0)
