"""Dense float64 tensors with tape-based reverse-mode differentiation.

Operations record onto the innermost active :class:`Tape` (per thread) when
at least one input requires a gradient. Outside a tape every op is a plain
numpy computation, which is how inference runs.
"""

from __future__ import annotations

import threading
from typing import Callable, Sequence

import numpy as np

_local = threading.local()


class ShapeError(ValueError):
    pass


def _tape_stack() -> list:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    return stack


def active_tape() -> "Tape | None":
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "name", "_tape")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.name = name
        self._tape: Tape | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, scalar_mul(_as_tensor(other), -1.0))

    def __rsub__(self, other):
        return add(_as_tensor(other), scalar_mul(self, -1.0))

    def __neg__(self):
        return scalar_mul(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scalar_mul(self, float(other))
        return mul(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


class Tape:
    """Ordered record of primitive applications; supports one backward pass."""

    def __init__(self):
        self.nodes: list[tuple[Tensor, tuple[Tensor, ...], Callable]] = []
        self.consumed = False

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        _tape_stack().pop()

    def record(self, out: Tensor, inputs: tuple[Tensor, ...], backward: Callable) -> None:
        out.requires_grad = True
        out._tape = self
        self.nodes.append((out, inputs, backward))

    def backward(self, loss: Tensor) -> None:
        if self.consumed:
            raise RuntimeError("backward already ran on this tape; run a new forward pass first")
        if loss.size != 1:
            raise ShapeError(f"backward: loss must be scalar, got shape {loss.shape}")
        if loss._tape is not self:
            raise RuntimeError("backward: loss was not recorded on this tape")
        self.consumed = True
        grads = {id(loss): np.ones_like(loss.data)}
        for out, inputs, fn in reversed(self.nodes):
            g = grads.pop(id(out), None)
            if g is None:
                continue
            for t, gi in zip(inputs, fn(g)):
                if gi is None or not t.requires_grad:
                    continue
                if t._tape is self:
                    key = id(t)
                    grads[key] = grads[key] + gi if key in grads else gi
                else:
                    if t.grad is None:
                        t.grad = np.zeros_like(t.data)
                    t.grad += gi
        self.nodes.clear()


def backward(loss: Tensor) -> None:
    """Populate ``.grad`` of every tracked leaf reachable from ``loss``."""
    if loss._tape is None:
        raise RuntimeError("backward: loss is not attached to a tape")
    loss._tape.backward(loss)


def _op(data: np.ndarray, inputs: tuple[Tensor, ...], backward: Callable) -> Tensor:
    out = Tensor(data)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(out, inputs, backward)
    return out


def _check_trailing(name: str, a: Tensor, b: Tensor) -> None:
    sa, sb = a.shape, b.shape
    if sa == sb:
        return
    short, long_ = (sa, sb) if len(sa) <= len(sb) else (sb, sa)
    if long_[len(long_) - len(short):] != short:
        raise ShapeError(f"{name}: incompatible shapes {sa} and {sb}")


def _sum_to(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    return g


# -- primitives ---------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_trailing("add", a, b)
    return _op(a.data + b.data, (a, b), lambda g: (_sum_to(g, a.shape), _sum_to(g, b.shape)))


def mul(a, b) -> Tensor:
    """Elementwise product (a scalar or trailing-shape operand broadcasts)."""
    a, b = _as_tensor(a), _as_tensor(b)
    _check_trailing("mul", a, b)
    return _op(a.data * b.data, (a, b),
               lambda g: (_sum_to(g * b.data, a.shape), _sum_to(g * a.data, b.shape)))


def scalar_mul(a, c: float) -> Tensor:
    a = _as_tensor(a)
    return _op(a.data * c, (a,), lambda g: (g * c,))


def matmul(a, b) -> Tensor:
    """numpy matmul semantics for 1-3 dims; batch dims must match exactly."""
    a, b = _as_tensor(a), _as_tensor(b)
    A, B = a.data, b.data
    inner_b = B.shape[-2] if B.ndim > 1 else (B.shape[0] if B.ndim == 1 else None)
    if A.ndim == 0 or B.ndim == 0 or A.ndim > 3 or B.ndim > 3 or A.shape[-1] != inner_b \
            or (A.ndim == 3 and B.ndim == 3 and A.shape[0] != B.shape[0]):
        raise ShapeError(f"matmul: incompatible shapes {A.shape} and {B.shape}")

    def backward(g):
        A2 = A if A.ndim > 1 else A[None, :]
        B2 = B if B.ndim > 1 else B[:, None]
        if B.ndim == 1:
            g = g[..., None]
        if A.ndim == 1:
            g = np.expand_dims(g, -2)
        ga = _sum_to(g @ np.swapaxes(B2, -1, -2), A2.shape).reshape(A.shape)
        gb = _sum_to(np.swapaxes(A2, -1, -2) @ g, B2.shape).reshape(B.shape)
        return ga, gb

    return _op(A @ B, (a, b), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = tuple(_as_tensor(t) for t in tensors)
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeError(f"concat: incompatible shapes {[t.shape for t in tensors]}") from exc
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]
    return _op(out, tensors, lambda g: tuple(np.split(g, splits, axis=axis)))


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = tuple(_as_tensor(t) for t in tensors)
    if len({t.shape for t in tensors}) != 1:
        raise ShapeError(f"stack: shapes differ {[t.shape for t in tensors]}")
    out = np.stack([t.data for t in tensors], axis=axis)
    ax = axis if axis >= 0 else axis + out.ndim
    return _op(out, tensors, lambda g: tuple(np.take(g, i, axis=ax) for i in range(len(tensors))))


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f"reshape: cannot reshape {a.shape} to {tuple(shape)}") from exc
    return _op(out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    axes = tuple(reversed(range(a.ndim))) if axes is None else tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _op(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),))


def sum(a: Tensor, axis: int | None = None) -> Tensor:  # noqa: A001
    def backward(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _op(np.sum(a.data, axis=axis), (a,), backward)


def mean(a: Tensor, axis: int | None = None) -> Tensor:
    count = a.size if axis is None else a.shape[axis]
    return scalar_mul(sum(a, axis), 1.0 / count)


def softmax(a: Tensor, axis: int = -1, mask: np.ndarray | None = None) -> Tensor:
    """Softmax along ``axis``; positions where ``mask`` is False get probability 0."""
    z = a.data
    if mask is not None:
        z = np.where(np.broadcast_to(mask, z.shape), z, -np.inf)
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=axis, keepdims=True)
    return _op(y, (a,), lambda g: (y * (g - (g * y).sum(axis=axis, keepdims=True)),))


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    e = np.exp(-np.abs(x))
    y = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return _op(y, (a,), lambda g: (g * y * (1.0 - y),))


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    return _op(y, (a,), lambda g: (g * (1.0 - y * y),))


def relu(a: Tensor) -> Tensor:
    x = a.data
    return _op(np.maximum(x, 0.0), (a,), lambda g: (g * (x > 0),))


def log(a: Tensor) -> Tensor:
    x = a.data
    return _op(np.log(x), (a,), lambda g: (g / x,))


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    x = a.data
    return _op(np.clip(x, lo, hi), (a,), lambda g: (g * ((x >= lo) & (x <= hi)),))


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Rows of ``table`` selected by an integer array of any shape."""
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2:
        raise ShapeError(f"embedding_lookup: table must be 2-d, got {table.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeError(f"embedding_lookup: ids out of range for table {table.shape}")

    def backward(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids, g)
        return (gt,)

    return _op(table.data[ids], (table,), backward)


def _is_basic(index) -> bool:
    parts = index if isinstance(index, tuple) else (index,)
    return all(isinstance(p, (int, np.integer, slice)) or p is Ellipsis or p is None for p in parts)


def getitem(a: Tensor, index) -> Tensor:
    basic = _is_basic(index)

    def backward(g):
        ga = np.zeros_like(a.data)
        if basic:
            ga[index] = g
        else:
            np.add.at(ga, index, g)
        return (ga,)

    return _op(np.array(a.data[index]), (a,), backward)


def dot(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 1 or b.ndim != 1:
        raise ShapeError(f"dot: expected vectors, got {a.shape} and {b.shape}")
    return matmul(a, b)


def parameter(data, name: str | None = None) -> Tensor:
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True, name=name)
