"""Parameter store, initialisation and the layers shared by every branch."""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from . import autograd as ag
from .autograd import Tensor


class ParamStore:
    """Ordered name -> Tensor mapping holding every learnable weight."""

    def __init__(self) -> None:
        self._tensors: dict[str, Tensor] = {}

    def add(self, name: str, value: np.ndarray) -> Tensor:
        if name in self._tensors:
            raise KeyError(f"parameter {name!r} already defined")
        t = Tensor(np.array(value, dtype=np.float64), requires_grad=True, name=name)
        self._tensors[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def names(self, prefix: str = "") -> list[str]:
        return [n for n in self._tensors if n.startswith(prefix)]

    def zero_grad(self) -> None:
        for t in self._tensors.values():
            t.grad = None

    def n_values(self) -> int:
        return sum(t.size for t in self._tensors.values())

    def arrays(self) -> dict[str, np.ndarray]:
        return {n: t.data for n, t in self._tensors.items()}

    def snapshot(self) -> dict[str, np.ndarray]:
        return {n: t.data.copy() for n, t in self._tensors.items()}

    def load(self, arrays: dict[str, np.ndarray]) -> None:
        missing = set(self._tensors) - set(arrays)
        extra = set(arrays) - set(self._tensors)
        if missing or extra:
            raise KeyError(f"parameter set mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for n, t in self._tensors.items():
            if arrays[n].shape != t.shape:
                raise ValueError(f"{n}: shape {arrays[n].shape} does not match {t.shape}")
            t.data = np.array(arrays[n], dtype=np.float64)


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


def add_linear(store: ParamStore, name: str, d_in: int, d_out: int, rng, bias: bool = True) -> None:
    store.add(f"{name}.W", glorot(rng, d_in, d_out))
    if bias:
        store.add(f"{name}.b", np.zeros(d_out))


def linear(store: ParamStore, name: str, x) -> Tensor:
    out = ag.matmul(x, store[f"{name}.W"])
    b = f"{name}.b"
    return out + store[b] if b in store else out


def add_layer_norm(store: ParamStore, name: str, d: int) -> None:
    store.add(f"{name}.gain", np.ones(d))
    store.add(f"{name}.bias", np.zeros(d))


def layer_norm(store: ParamStore, name: str, x, eps: float = 1e-5) -> Tensor:
    return ag.layer_norm(x, store[f"{name}.gain"], store[f"{name}.bias"], eps)


def add_ffn(store: ParamStore, name: str, d: int, mult: int, rng) -> None:
    add_linear(store, f"{name}.in", d, mult * d, rng)
    add_linear(store, f"{name}.out", mult * d, d, rng)


def ffn(store: ParamStore, name: str, x) -> Tensor:
    return linear(store, f"{name}.out", ag.relu(linear(store, f"{name}.in", x)))


def add_attention(store: ParamStore, name: str, d_q: int, d_k: int, d_model: int, heads: int, rng) -> None:
    if d_model % heads:
        raise ValueError(f"{name}: {heads} heads do not divide model width {d_model}")
    add_linear(store, f"{name}.q", d_q, d_model, rng)
    add_linear(store, f"{name}.k", d_k, d_model, rng)
    add_linear(store, f"{name}.v", d_k, d_model, rng)
    add_linear(store, f"{name}.o", d_model, d_model, rng)


def attention_weights(store: ParamStore, name: str, q_in, k_in, heads: int, key_mask=None, empty="error") -> Tensor:
    """Per-head attention weights [h x lq x lk]."""
    q = linear(store, f"{name}.q", q_in)
    k = linear(store, f"{name}.k", k_in)
    d_model = q.shape[-1]
    dh = d_model // heads
    qh = ag.transpose(ag.reshape(q, (q.shape[0], heads, dh)), (1, 0, 2))
    kh = ag.transpose(ag.reshape(k, (k.shape[0], heads, dh)), (1, 0, 2))
    scores = ag.matmul(qh, ag.swap_last(kh)) / math.sqrt(dh)
    mask = None if key_mask is None else np.asarray(key_mask, dtype=bool)[None]
    return ag.masked_softmax(scores, axis=-1, mask=mask, empty=empty)


def multi_head_attention(store: ParamStore, name: str, q_in, kv_in, heads: int, key_mask=None) -> Tensor:
    """Scaled dot-product attention with ``heads`` heads.

    ``key_mask`` is a boolean [lq x lk] (or [lk]) matrix of allowed
    query/key pairs; packed batches use it to keep sequences apart.
    """
    weights = attention_weights(store, name, q_in, kv_in, heads, key_mask)
    v = linear(store, f"{name}.v", kv_in)
    d_model = v.shape[-1]
    dh = d_model // heads
    vh = ag.transpose(ag.reshape(v, (v.shape[0], heads, dh)), (1, 0, 2))
    ctx = ag.matmul(weights, vh)
    ctx = ag.reshape(ag.transpose(ctx, (1, 0, 2)), (ctx.shape[1], d_model))
    return linear(store, f"{name}.o", ctx)


def same_segment(seg_q, seg_k) -> np.ndarray:
    return np.asarray(seg_q)[:, None] == np.asarray(seg_k)[None, :]


def _split_heads(x, heads: int) -> Tensor:
    """[B x L x D] -> [B x h x L x D/h]."""
    b, length, d = x.shape
    return ag.transpose(ag.reshape(x, (b, length, heads, d // heads)), (0, 2, 1, 3))


def segment_attention(store: ParamStore, name: str, q_in, q_seg, kv_in, kv_seg, heads: int,
                      return_weights: bool = False):
    """Multi-head attention in which each query row only sees key rows of its own segment.

    Equal to ``multi_head_attention`` with ``same_segment(q_seg, kv_seg)`` as the
    key mask, but computed per segment on a padded layout, so the cost grows
    with the longest segment rather than with the whole batch.
    """
    q_seg = np.asarray(q_seg, dtype=np.intp)
    kv_seg = np.asarray(kv_seg, dtype=np.intp)
    if len(q_seg) == 0:
        return ag.as_tensor(np.zeros((0, store[f"{name}.o.W"].shape[1])))
    n_seg = int(max(q_seg.max(), kv_seg.max(initial=-1))) + 1
    has_keys = np.bincount(kv_seg, minlength=n_seg) > 0
    if not has_keys[q_seg].all():
        raise ag.DegenerateMaskError(f"{name}: a query row has no key in its segment")
    q = linear(store, f"{name}.q", q_in)
    k = linear(store, f"{name}.k", kv_in)
    v = linear(store, f"{name}.v", kv_in)
    d_model = q.shape[-1]
    dh = d_model // heads
    qh = _split_heads(ag.pad_segments(q, q_seg, n_seg), heads)
    kh = _split_heads(ag.pad_segments(k, kv_seg, n_seg), heads)
    vh = _split_heads(ag.pad_segments(v, kv_seg, n_seg), heads)
    k_pos, k_len = ag.segment_positions(kv_seg, n_seg)
    key_mask = np.zeros((n_seg, k_len), dtype=bool)
    key_mask[kv_seg, k_pos] = True
    scores = ag.matmul(qh, ag.swap_last(kh)) / math.sqrt(dh)
    # padded query rows of key-less segments come out as zeros and are dropped below
    weights = ag.masked_softmax(scores, axis=-1, mask=key_mask[:, None, None, :], empty="zero")
    ctx = ag.transpose(ag.matmul(weights, vh), (0, 2, 1, 3))
    ctx = ag.reshape(ctx, (n_seg, ctx.shape[1], d_model))
    q_pos, _ = ag.segment_positions(q_seg, n_seg)
    out = linear(store, f"{name}.o", ag.getitem(ctx, (q_seg, q_pos)))
    if return_weights:
        return out, weights, key_mask
    return out

