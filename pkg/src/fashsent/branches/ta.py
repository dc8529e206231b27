"""Text/attribute branch: shared self-attention stack and mutual attention."""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..batch import Batch
from ..config import ModelConfig
from ..nn import (
    ParamStore, add_attention, add_ffn, add_layer_norm, add_linear, ffn, glorot,
    layer_norm, linear, same_segment, segment_attention,
)

STACK = "ta.stack"


def add_params(store: ParamStore, cfg: ModelConfig, rng: np.random.Generator) -> None:
    d = cfg.text_dim
    for j in range(cfg.ta_depth):
        add_attention(store, f"{STACK}.{j}.att", d, d, d, cfg.ta_heads, rng)
        add_layer_norm(store, f"{STACK}.{j}.ln1", d)
        add_ffn(store, f"{STACK}.{j}.ffn", d, cfg.ffn_mult, rng)
        add_layer_norm(store, f"{STACK}.{j}.ln2", d)
    store.add("ta.w1", glorot(rng, 2 * d, 1, shape=(2 * d,)))
    store.add("ta.b1", np.zeros(()))
    store.add("ta.w2", glorot(rng, 2 * d, 1, shape=(2 * d,)))
    store.add("ta.b2", np.zeros(()))
    add_linear(store, "ta.head", d, cfg.n_classes, rng)


def self_attention_stack(store: ParamStore, cfg: ModelConfig, seq, seg, depth: int | None = None) -> ag.Tensor:
    """Run the block stack over packed sequences; average the block outputs."""
    seq = ag.as_tensor(seq)
    if seq.shape[0] == 0:
        return seq
    depth = cfg.ta_depth if depth is None else depth
    h = seq
    outs = []
    for j in range(depth):
        name = f"{STACK}.{j}"
        a = segment_attention(store, f"{name}.att", h, seg, h, seg, cfg.ta_heads)
        h1 = layer_norm(store, f"{name}.ln1", h + a, cfg.ln_eps)
        h = layer_norm(store, f"{name}.ln2", h1 + ffn(store, f"{name}.ffn", h1), cfg.ln_eps)
        outs.append(h)
    total = outs[0]
    for o in outs[1:]:
        total = total + o
    return total / float(depth)


def text_path(store, cfg, text, seg):
    return self_attention_stack(store, cfg, text, seg)


def attribute_path(store, cfg, attr, seg):
    return self_attention_stack(store, cfg, attr, seg)


def a2t_attention(store: ParamStore, cfg: ModelConfig, x, x_seg, y, y_seg) -> tuple[ag.Tensor, ag.Tensor]:
    """Attribute-to-text attention.

    Returns the matching vectors S [N_a x d] (attended text times attribute,
    elementwise) and the weights alpha [N_a x N_t], normalised over the text
    rows of the same post.
    """
    d = cfg.text_dim
    w1 = store["ta.w1"]
    ax = ag.matmul(x, w1[:d])
    ay = ag.matmul(y, w1[d:])
    logits = ag.tanh(ag.reshape(ay, (-1, 1)) + ag.reshape(ax, (1, -1)) + store["ta.b1"])
    alpha = ag.masked_softmax(logits, axis=1, mask=same_segment(y_seg, x_seg), empty="zero")
    attended = ag.matmul(alpha, x)
    return attended * y, alpha


def t2a_weights(store: ParamStore, cfg: ModelConfig, x, x_seg, y, y_seg, n_posts: int) -> ag.Tensor:
    """Text-to-attribute weights beta [B x N_a]; zero outside each post's attributes."""
    d = cfg.text_dim
    w2 = store["ta.w2"]
    x_bar = ag.segment_mean(x, x_seg, n_posts)
    bx = ag.matmul(x_bar, w2[:d])
    by = ag.matmul(y, w2[d:])
    logits = ag.tanh(ag.reshape(bx, (-1, 1)) + ag.reshape(by, (1, -1)) + store["ta.b2"])
    own = np.arange(n_posts)[:, None] == np.asarray(y_seg)[None, :]
    return ag.masked_softmax(logits, axis=1, mask=own, empty="zero")


def ta_score(store: ParamStore, S, beta, has_attr: np.ndarray) -> ag.Tensor:
    """Beta-weighted sum of matching vectors, affine head, softmax.

    Posts without any attribute get the uniform score.
    """
    v = ag.matmul(beta, S)
    scores = ag.softmax(linear(store, "ta.head", v), axis=-1)
    keep = has_attr.astype(np.float64)[:, None]
    n_cls = scores.shape[-1]
    return scores * keep + (1.0 - keep) / n_cls


def forward(store: ParamStore, cfg: ModelConfig, batch: Batch, details: bool = False):
    x = text_path(store, cfg, batch.text, batch.text_seg)
    y = attribute_path(store, cfg, batch.attr, batch.attr_seg)
    S, alpha = a2t_attention(store, cfg, x, batch.text_seg, y, batch.attr_seg)
    beta = t2a_weights(store, cfg, x, batch.text_seg, y, batch.attr_seg, batch.size)
    has_attr = np.bincount(batch.attr_seg, minlength=batch.size) > 0
    scores = ta_score(store, S, beta, has_attr)
    if details:
        return scores, {"x": x, "y": y, "S": S, "alpha": alpha, "beta": beta}
    return scores
