"""LSTM cells and masked bidirectional LSTM built from tape primitives.

Gate layout along the last axis of the 4H pre-activation is input, forget,
output, candidate.
"""

from __future__ import annotations

import numpy as np

from winsumm.tensor.core import (
    ShapeError, Tensor, add, concat, getitem, matmul, mul, parameter, sigmoid, stack, tanh,
)


def init_lstm(rng: np.random.Generator, input_dim: int, hidden: int, prefix: str = "lstm") -> dict[str, Tensor]:
    return {
        "W_x": parameter(rng.uniform(-0.1, 0.1, (input_dim, 4 * hidden)), f"{prefix}.W_x"),
        "W_h": parameter(rng.uniform(-0.1, 0.1, (hidden, 4 * hidden)), f"{prefix}.W_h"),
        "b": parameter(np.zeros(4 * hidden), f"{prefix}.b"),
    }


def _cell(gates: Tensor, c_prev: Tensor, H: int) -> tuple[Tensor, Tensor]:
    i = sigmoid(gates[..., :H])
    f = sigmoid(gates[..., H:2 * H])
    o = sigmoid(gates[..., 2 * H:3 * H])
    g = tanh(gates[..., 3 * H:])
    c = add(mul(f, c_prev), mul(i, g))
    return mul(o, tanh(c)), c


def lstm_step(x: Tensor, h_prev: Tensor, c_prev: Tensor, params: dict[str, Tensor]) -> tuple[Tensor, Tensor]:
    """One LSTM step for a single input vector or a (batch, input) matrix."""
    H = params["W_h"].shape[0]
    gates = matmul(x, params["W_x"]) + matmul(h_prev, params["W_h"]) + params["b"]
    return _cell(gates, c_prev, H)


def lstm(xs: Tensor, params: dict[str, Tensor], lengths: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """Run over ``xs`` of shape (batch, steps, input) from zero states.

    Returns all hidden states (batch, steps, H) and the final hidden state
    (batch, H). With ``lengths``, a row's state is frozen once its length is
    reached, so its final state is the one at step ``length - 1``.
    """
    if xs.ndim != 3:
        raise ShapeError(f"lstm: expected (batch, steps, input), got {xs.shape}")
    B, T, _ = xs.shape
    if T == 0:
        raise ShapeError("lstm: zero-length sequence")
    H = params["W_h"].shape[0]
    xw = matmul(xs, params["W_x"]) + params["b"]
    h = Tensor(np.zeros((B, H)))
    c = Tensor(np.zeros((B, H)))
    outs = []
    for t in range(T):
        gates = xw[:, t] + matmul(h, params["W_h"])
        h_new, c_new = _cell(gates, c, H)
        if lengths is not None and np.any(lengths <= t):
            keep = np.broadcast_to((t < lengths)[:, None], (B, H)).astype(np.float64)
            drop = 1.0 - keep
            h = mul(h_new, keep) + mul(h, drop)
            c = mul(c_new, keep) + mul(c, drop)
        else:
            h, c = h_new, c_new
        outs.append(h)
    return stack(outs, axis=1), h


def reversal_index(lengths: np.ndarray, steps: int) -> np.ndarray:
    """Per-row index that reverses the first ``length`` steps and fixes padding."""
    t = np.arange(steps)[None, :]
    L = np.asarray(lengths)[:, None]
    return np.where(t < L, L - 1 - t, t)


def bilstm(xs: Tensor, fwd: dict[str, Tensor], bwd: dict[str, Tensor],
           lengths: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """Bidirectional LSTM over (batch, steps, input).

    Returns per-step outputs (batch, steps, 2H) as [forward, backward] with the
    backward half re-aligned to the original order, and final states
    (batch, 2H) = [forward state at the last real step, backward state at step 0].
    """
    if xs.ndim != 3:
        raise ShapeError(f"bilstm: expected (batch, steps, input), got {xs.shape}")
    B, T, _ = xs.shape
    if T == 0:
        raise ShapeError("bilstm: zero-length sequence")
    lengths = np.full(B, T) if lengths is None else np.asarray(lengths)
    if lengths.min() < 1 or lengths.max() > T:
        raise ShapeError(f"bilstm: lengths must lie in [1, {T}]")
    rows = np.arange(B)[:, None]
    rev = reversal_index(lengths, T)
    out_f, h_f = lstm(xs, fwd, lengths)
    out_b_rev, h_b = lstm(getitem(xs, (rows, rev)), bwd, lengths)
    out_b = getitem(out_b_rev, (rows, rev))
    return concat([out_f, out_b], axis=2), concat([h_f, h_b], axis=1)
