"""Reverse-mode autodiff over dense numpy arrays.

Each op returns a Tensor carrying a closure that scatters the output
gradient back to its parents; backward() walks the graph in reverse
topological order.  Graphs are built only when some ancestor can use a
gradient, so pure inference allocates no tape.
"""

import numpy as np

from ..errors import ShapeError
from . import backend


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, _parents=(), _backward=None):
        self.data = data if isinstance(data, np.ndarray) else np.asarray(data)
        self.requires_grad = requires_grad
        self.grad = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.size != 1:
            raise ShapeError("scalar output", self.data.shape)
        order = _toposort(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _toposort(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def _tracked(t: Tensor) -> bool:
    return t.requires_grad or t._parents


def _accumulate(t: Tensor, g: np.ndarray):
    if not _tracked(t):
        return
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _make(data, parents, backward) -> Tensor:
    if any(_tracked(p) for p in parents):
        return Tensor(data, _parents=tuple(parents), _backward=backward)
    return Tensor(data)


def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(g, b.data.shape))

    return _make(out_data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.data, a.data.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.data.shape))

    return _make(out_data, (a, b), backward)


def scale(a: Tensor, s: float) -> Tensor:
    out_data = a.data * a.data.dtype.type(s)

    def backward(g):
        _accumulate(a, g * a.data.dtype.type(s))

    return _make(out_data, (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError("2-d operands", (a.data.shape, b.data.shape))
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"inner dims to agree", (a.data.shape, b.data.shape))
    out_data = a.data @ b.data

    def backward(g):
        _accumulate(a, g @ b.data.T)
        _accumulate(b, a.data.T @ g)

    return _make(out_data, (a, b), backward)


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)

    def backward(g):
        _accumulate(a, g * (1 - out_data * out_data))

    return _make(out_data, (a,), backward)


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    out_data = np.empty_like(x)
    pos = x >= 0
    out_data[pos] = 1 / (1 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out_data[~pos] = ex / (1 + ex)

    def backward(g):
        _accumulate(a, g * out_data * (1 - out_data))

    return _make(out_data, (a,), backward)


def reshape(a: Tensor, shape) -> Tensor:
    out_data = a.data.reshape(shape)

    def backward(g):
        _accumulate(a, g.reshape(a.data.shape))

    return _make(out_data, (a,), backward)


def swap_time_channel(a: Tensor) -> Tensor:
    """(B, L, C) <-> (B, C, L)."""
    out_data = np.ascontiguousarray(a.data.swapaxes(1, 2))

    def backward(g):
        _accumulate(a, g.swapaxes(1, 2))

    return _make(out_data, (a,), backward)


def concat(tensors, axis: int = -1) -> Tensor:
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
            _accumulate(t, piece)

    return _make(out_data, tuple(tensors), backward)


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    index = [slice(None)] * a.data.ndim
    index[axis] = slice(start, start + length)
    index = tuple(index)
    out_data = np.ascontiguousarray(a.data[index])

    def backward(g):
        full = np.zeros_like(a.data)
        full[index] = g
        _accumulate(a, full)

    return _make(out_data, (a,), backward)


def select_time(a: Tensor, step: int) -> Tensor:
    """(B, M, D) -> (B, D) at one timestep."""
    out_data = np.ascontiguousarray(a.data[:, step, :])

    def backward(g):
        full = np.zeros_like(a.data)
        full[:, step, :] = g
        _accumulate(a, full)

    return _make(out_data, (a,), backward)


def stack_time(tensors) -> Tensor:
    """M tensors of (B, D) -> (B, M, D)."""
    out_data = np.stack([t.data for t in tensors], axis=1)

    def backward(g):
        for m, t in enumerate(tensors):
            _accumulate(t, g[:, m, :])

    return _make(out_data, tuple(tensors), backward)


def mean_over_time(a: Tensor) -> Tensor:
    """(B, M, D) -> (B, D), arithmetic mean over the time axis."""
    m = a.data.shape[1]
    out_data = a.data.mean(axis=1)

    def backward(g):
        _accumulate(a, np.repeat(g[:, None, :], m, axis=1) / a.data.dtype.type(m))

    return _make(out_data, (a,), backward)


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    out_data = np.asarray(a.data.mean(), dtype=a.data.dtype)

    def backward(g):
        _accumulate(a, np.full_like(a.data, g / a.data.dtype.type(n)))

    return _make(out_data, (a,), backward)


def gather_rows(table: Tensor, indices: np.ndarray) -> Tensor:
    """Embedding lookup: table (V, E), int indices (..., ) -> (..., E)."""
    idx = np.asarray(indices)
    out_data = table.data[idx]

    def backward(g):
        if not _tracked(table):
            return
        if table.grad is None:
            table.grad = np.zeros_like(table.data)
        np.add.at(table.grad, idx.reshape(-1), g.reshape(-1, table.data.shape[1]))

    return _make(out_data, (table,), backward)


def softmax(a: Tensor) -> Tensor:
    """Stable softmax along the last axis."""
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        inner = (g * out_data).sum(axis=-1, keepdims=True)
        _accumulate(a, out_data * (g - inner))

    return _make(out_data, (a,), backward)


def conv1d(x: Tensor, w: Tensor) -> Tensor:
    if x.data.ndim != 3 or w.data.ndim != 3:
        raise ShapeError("(B,C,L) and (O,C,K)", (x.data.shape, w.data.shape))
    if x.data.shape[1] != w.data.shape[1]:
        raise ShapeError(f"{w.data.shape[1]} input channels", x.data.shape)
    if x.data.shape[2] < w.data.shape[2]:
        raise ShapeError(f"length >= {w.data.shape[2]}", x.data.shape)
    out_data = backend.conv1d_fwd(x.data, w.data)

    def backward(g):
        g = np.ascontiguousarray(g)
        if _tracked(x):
            _accumulate(x, backend.conv1d_bwd_input(g, w.data, x.data.shape[2]))
        if _tracked(w):
            _accumulate(w, backend.conv1d_bwd_weight(x.data, g, w.data.shape[2]))

    return _make(out_data, (x, w), backward)


def maxpool1d(x: Tensor, width: int, stride: int) -> Tensor:
    if x.data.ndim != 3:
        raise ShapeError("(B,C,L)", x.data.shape)
    if x.data.shape[2] < width:
        raise ShapeError(f"length >= {width}", x.data.shape)
    out_data, arg = backend.maxpool1d_fwd(x.data, width, stride)

    def backward(g):
        _accumulate(x, backend.maxpool1d_bwd(np.ascontiguousarray(g), arg, x.data.shape[2]))

    return _make(out_data, (x,), backward)


def conv3d(x: Tensor, w: Tensor, stride: tuple) -> Tensor:
    if x.data.ndim != 5 or w.data.ndim != 5:
        raise ShapeError("(B,C,T,H,W) and (O,C,kt,kh,kw)", (x.data.shape, w.data.shape))
    if x.data.shape[1] != w.data.shape[1]:
        raise ShapeError(f"{w.data.shape[1]} input channels", x.data.shape)
    if any(x.data.shape[2 + i] < w.data.shape[2 + i] for i in range(3)):
        raise ShapeError("input at least kernel-sized", (x.data.shape, w.data.shape))
    st, sh, sw = stride
    out_data = backend.conv3d_fwd(x.data, w.data, st, sh, sw)

    def backward(g):
        g = np.ascontiguousarray(g)
        if _tracked(x):
            _, _, T, H, W = x.data.shape
            _accumulate(x, backend.conv3d_bwd_input(g, w.data, T, H, W, st, sh, sw))
        if _tracked(w):
            _, _, kt, kh, kw = w.data.shape
            _accumulate(w, backend.conv3d_bwd_weight(x.data, g, kt, kh, kw, st, sh, sw))

    return _make(out_data, (x, w), backward)
