"""Dense float64 tensors with define-by-run reverse-mode differentiation.

Every op returns a new :class:`Tensor` that remembers its parents and a
closure mapping the upstream gradient to gradients for each parent.  The
graph is rebuilt on every forward pass and walked once by :func:`backward`.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class DegenerateMaskError(ValueError):
    pass


class ContractError(ValueError):
    pass


_GRAD_ENABLED = True
_KINK_LOG: list | None = None


@contextlib.contextmanager
def no_grad():
    """Disable graph recording (evaluation passes)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "op", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable | None = None
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        tag = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op}{tag})"

    __array_priority__ = 100

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(as_tensor(other)))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False):
        return sum_(self, axis, keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        return mean(self, axis, keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data: np.ndarray, parents: Sequence[Tensor], backward_fn: Callable, op: str) -> Tensor:
    out = Tensor(data)
    out.op = op
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------- graph walk


@dataclass(frozen=True)
class GraphNode:
    op: str
    inputs: tuple[int, ...]
    output: int


@dataclass
class Graph:
    nodes: list[GraphNode] = field(default_factory=list)
    order: list[Tensor] = field(default_factory=list)


def trace(root: Tensor) -> Graph:
    """Topologically ordered graph feeding ``root`` (inputs before users)."""
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
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    nodes = [GraphNode(t.op, tuple(id(p) for p in t._parents), id(t)) for t in order]
    return Graph(nodes=nodes, order=order)


def backward(loss: Tensor, graph: Graph | None = None) -> None:
    """Accumulate d(loss)/d(leaf) into ``.grad`` of every leaf requiring grad."""
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    graph = graph or trace(loss)
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(graph.order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            node.grad = g.copy() if node.grad is None else node.grad + g
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg


# ---------------------------------------------------------------- elementwise


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def bw(g):
        return (_unbroadcast(g, a.shape) if a.requires_grad else None,
                _unbroadcast(g, b.shape) if b.requires_grad else None)

    return _make(out, (a, b), bw, "add")


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _make(-a.data, (a,), lambda g: (-g,), "neg")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def bw(g):
        ga = _unbroadcast(g * b.data, a.shape) if a.requires_grad else None
        gb = _unbroadcast(g * a.data, b.shape) if b.requires_grad else None
        return ga, gb

    return _make(a.data * b.data, (a, b), bw, "mul")


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data

    def bw(g):
        ga = _unbroadcast(g / b.data, a.shape) if a.requires_grad else None
        gb = _unbroadcast(-g * out / b.data, b.shape) if b.requires_grad else None
        return ga, gb

    return _make(out, (a, b), bw, "div")


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return _make(out, (a,), lambda g: (g * out,), "exp")


def log(a) -> Tensor:
    a = as_tensor(a)
    return _make(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)
    return _make(out, (a,), lambda g: (g * (1.0 - out * out),), "tanh")


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    # split by sign so exp never overflows
    x = a.data
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return _make(out, (a,), lambda g: (g * out * (1.0 - out),), "sigmoid")


@contextlib.contextmanager
def kink_probe():
    """Record the on/off pattern of every relu evaluated inside the block.

    Finite-difference checks compare patterns at x+eps and x-eps; a change
    means the step crossed a kink and the difference quotient is meaningless.
    """
    global _KINK_LOG
    prev = _KINK_LOG
    _KINK_LOG = []
    try:
        yield _KINK_LOG
    finally:
        _KINK_LOG = prev


def relu(a) -> Tensor:
    a = as_tensor(a)
    keep = a.data > 0
    if _KINK_LOG is not None:
        _KINK_LOG.append(np.packbits(keep).tobytes())
    return _make(np.where(keep, a.data, 0.0), (a,), lambda g: (g * keep,), "relu")


# ---------------------------------------------------------------- reductions / shape


def _norm_axis(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(ax % ndim for ax in axis)


def sum_(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _norm_axis(axis, a.ndim)
    out = a.data.sum(axis=axes, keepdims=keepdims)

    def bw(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _make(out, (a,), bw, "sum")


def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _norm_axis(axis, a.ndim)
    count = int(np.prod([a.shape[ax] for ax in axes])) if axes else 1
    return sum_(a, axis, keepdims) / float(count)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    return _make(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),), "reshape")


def transpose(a, axes=None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    inverse = np.argsort(axes)
    return _make(a.data.transpose(axes), (a,), lambda g: (g.transpose(inverse),), "transpose")


def swap_last(a) -> Tensor:
    a = as_tensor(a)
    axes = list(range(a.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(a, tuple(axes))


def getitem(a, index) -> Tensor:
    a = as_tensor(a)

    def bw(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return _make(a.data[index], (a,), bw, "getitem")


def take_rows(a, idx) -> Tensor:
    """Gather rows ``a[idx]`` (idx may repeat)."""
    idx = np.asarray(idx, dtype=np.intp)
    return getitem(a, idx)


def segment_positions(seg, n_seg: int) -> tuple[np.ndarray, int]:
    """Rank of each row within its segment (in row order) and the longest segment length."""
    seg = np.asarray(seg, dtype=np.intp)
    counts = np.bincount(seg, minlength=n_seg)
    order = np.argsort(seg, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    pos = np.empty(len(seg), dtype=np.intp)
    pos[order] = np.arange(len(seg)) - starts[seg[order]]
    return pos, int(counts.max(initial=0))


def pad_segments(x, seg, n_seg: int) -> Tensor:
    """Scatter packed rows [N x ...] into a zero-padded [n_seg x L x ...] block."""
    x = as_tensor(x)
    seg = np.asarray(seg, dtype=np.intp)
    pos, length = segment_positions(seg, n_seg)
    out = np.zeros((n_seg, length) + x.shape[1:])
    out[seg, pos] = x.data

    def bw(g):
        return (g[seg, pos],)

    return _make(out, (x,), bw, "pad_segments")


def concat(tensors: Iterable, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def bw(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _make(out, tensors, bw, "concat")


# ---------------------------------------------------------------- linear algebra


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim not in (1, 2, a.ndim) or a.shape[-1] != b.shape[-2 if b.ndim > 1 else 0]:
        raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    if b.ndim == a.ndim and a.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise DimensionError(f"matmul: batch extents differ, {a.shape} vs {b.shape}")
    out = a.data @ b.data

    def bw(g):
        ga = gb = None
        k = a.shape[-1]
        if b.ndim == 1:
            if a.requires_grad:
                ga = g[..., None] * b.data
            if b.requires_grad:
                gb = a.data.reshape(-1, k).T @ g.reshape(-1)
        elif b.ndim == 2:
            if a.requires_grad:
                ga = g @ b.data.T
            if b.requires_grad:
                gb = a.data.reshape(-1, k).T @ g.reshape(-1, b.shape[-1])
        else:
            if a.requires_grad:
                ga = g @ np.swapaxes(b.data, -1, -2)
            if b.requires_grad:
                gb = np.swapaxes(a.data, -1, -2) @ g
        return ga, gb

    return _make(out, (a, b), bw, "matmul")


# ---------------------------------------------------------------- attention primitives


def masked_softmax(x, axis: int = -1, mask=None, empty: str = "error") -> Tensor:
    """Softmax along ``axis``; slots where ``mask`` is False get exactly 0.

    ``empty`` decides what a slice with no unmasked slot does: ``"error"``
    raises :class:`DegenerateMaskError`, ``"zero"`` returns an all-zero slice.
    """
    x = as_tensor(x)
    z = x.data
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        try:
            m = np.broadcast_to(mask, z.shape)
        except ValueError:
            raise DimensionError(f"masked_softmax: mask {mask.shape} does not fit input {z.shape}") from None
        live = m.any(axis=axis, keepdims=True)
        if not live.all() and empty == "error":
            raise DegenerateMaskError("masked_softmax: a slice has every slot masked")
        z = np.where(m, z, -np.inf)
        zmax = np.where(live, np.max(z, axis=axis, keepdims=True), 0.0)
        e = np.exp(z - zmax)
        s = e.sum(axis=axis, keepdims=True)
        out = np.where(live, e / np.where(live, s, 1.0), 0.0)
    else:
        e = np.exp(z - z.max(axis=axis, keepdims=True))
        out = e / e.sum(axis=axis, keepdims=True)

    def bw(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return _make(out, (x,), bw, "masked_softmax")


def softmax(x, axis: int = -1) -> Tensor:
    return masked_softmax(x, axis=axis)


def layer_norm(x, gain, bias, eps: float = 1e-5) -> Tensor:
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError(f"layer_norm: last extent {d} vs gain {gain.shape}, bias {bias.shape}")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + eps)
    xhat = xc * inv
    out = xhat * gain.data + bias.data

    def bw(g):
        gx = ggain = gbias = None
        if x.requires_grad:
            dxhat = g * gain.data
            gx = inv * (
                dxhat
                - dxhat.mean(axis=-1, keepdims=True)
                - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
            )
        if gain.requires_grad:
            ggain = (g * xhat).reshape(-1, d).sum(axis=0)
        if bias.requires_grad:
            gbias = g.reshape(-1, d).sum(axis=0)
        return gx, ggain, gbias

    return _make(out, (x, gain, bias), bw, "layer_norm")


def segment_mean(x, seg, n_seg: int) -> Tensor:
    """Mean of the rows of ``x`` per segment id; empty segments give zero rows.

    Rows are sorted per column before summing, so the result does not depend
    on the order of rows within a segment, bit for bit.
    """
    x = as_tensor(x)
    seg = np.asarray(seg, dtype=np.intp)
    if x.ndim != 2 or seg.shape != (x.shape[0],):
        raise DimensionError(f"segment_mean: rows {x.shape} vs segment ids {seg.shape}")
    counts = np.bincount(seg, minlength=n_seg).astype(np.float64)
    out = np.zeros((n_seg, x.shape[1]))
    for s in np.flatnonzero(counts):
        rows = x.data[seg == s]
        out[s] = np.sort(rows, axis=0).sum(axis=0) / counts[s]

    def bw(g):
        return (g[seg] / counts[seg][:, None],)

    return _make(out, (x,), bw, "segment_mean")


def cross_entropy(scores, gold) -> Tensor:
    """Mean over rows of -log(score[gold] / sum(score)).

    ``scores`` is [B x C] (or [C] for one sample); ``gold`` class indices.
    """
    scores = as_tensor(scores)
    if scores.ndim == 1:
        scores = reshape(scores, (1, -1))
    gold = np.atleast_1d(np.asarray(gold))
    n_cls = scores.shape[1]
    if gold.shape != (scores.shape[0],):
        raise DimensionError(f"cross_entropy: {gold.shape[0]} labels for {scores.shape[0]} rows")
    if not np.issubdtype(gold.dtype, np.integer) or (gold < 0).any() or (gold >= n_cls).any():
        raise ValueError(f"cross_entropy: gold labels must lie in 0..{n_cls - 1}, got {gold.tolist()}")
    picked = getitem(scores, (np.arange(len(gold)), gold))
    total = sum_(scores, axis=1)
    return neg(mean(log(picked) - log(total)))


def check_finite(t: Tensor, what: str) -> None:
    if not np.isfinite(t.data).all():
        raise FloatingPointError(f"{what}: non-finite values")
