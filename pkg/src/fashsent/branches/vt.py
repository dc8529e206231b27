"""Vision/text branch: bidirectional cross-modal transformer and self-attention head."""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..batch import Batch
from ..config import ModelConfig
from ..nn import (
    ParamStore, add_attention, add_ffn, add_layer_norm, add_linear, ffn,
    layer_norm, linear, segment_attention,
)

DIRECTIONS = ("tv", "vt")  # tv: vision queries attend text; vt: the reverse


def add_params(store: ParamStore, cfg: ModelConfig, rng: np.random.Generator) -> None:
    d = cfg.vt_dim
    add_linear(store, "vt.proj_v", cfg.vision_dim, d, rng)
    add_linear(store, "vt.proj_t", cfg.text_dim, d, rng)
    for direction in DIRECTIONS:
        add_attention(store, f"vt.{direction}.init", d, d, d, cfg.vt_heads, rng)
        for i in range(cfg.vt_depth):
            name = f"vt.{direction}.{i}"
            add_layer_norm(store, f"{name}.ln_q", d)
            add_layer_norm(store, f"{name}.ln_src", d)
            add_attention(store, f"{name}.att", d, d, d, cfg.vt_heads, rng)
            add_layer_norm(store, f"{name}.ln_mid", d)
            add_ffn(store, f"{name}.ffn", d, cfg.ffn_mult, rng)
    add_linear(store, "vt.fc", d, d, rng)
    add_attention(store, "vt.satt", d, d, d, cfg.vt_heads, rng)
    add_linear(store, "vt.head", d, cfg.n_classes, rng)


def crossmodal_block(store: ParamStore, cfg: ModelConfig, name: str, y_prev, y_seg, src0, src_seg) -> ag.Tensor:
    q = layer_norm(store, f"{name}.ln_q", y_prev, cfg.ln_eps)
    src = layer_norm(store, f"{name}.ln_src", src0, cfg.ln_eps)
    y_hat = segment_attention(store, f"{name}.att", q, y_seg, src, src_seg, cfg.vt_heads) + q
    mid = layer_norm(store, f"{name}.ln_mid", y_hat, cfg.ln_eps)
    return ffn(store, f"{name}.ffn", mid) + mid


def _direction(store, cfg, direction, queries0, q_seg, sources0, src_seg):
    y = segment_attention(store, f"vt.{direction}.init", queries0, q_seg, sources0, src_seg, cfg.vt_heads)
    for i in range(cfg.vt_depth):
        # every block attends to the layer-0 source, never to an updated one
        y = crossmodal_block(store, cfg, f"vt.{direction}.{i}", y, q_seg, sources0, src_seg)
    return y


def crossmodal_transformer(store: ParamStore, cfg: ModelConfig, regions, region_seg, text, text_seg):
    """Return (Y_tv [N_v x d], Y_vt [N_t x d]) for packed region and text rows."""
    v0 = linear(store, "vt.proj_v", regions)
    t0 = linear(store, "vt.proj_t", text)
    y_tv = _direction(store, cfg, "tv", v0, region_seg, t0, text_seg)
    y_vt = _direction(store, cfg, "vt", t0, text_seg, v0, region_seg)
    return y_tv, y_vt


def vt_score(store: ParamStore, cfg: ModelConfig, y_tv, tv_seg, y_vt, vt_seg, n_posts: int) -> ag.Tensor:
    y = ag.concat([y_tv, y_vt], axis=0)
    seg = np.concatenate([tv_seg, vt_seg])
    u = linear(store, "vt.fc", y)
    z = segment_attention(store, "vt.satt", u, seg, u, seg, cfg.vt_heads) + y
    pooled = ag.segment_mean(z, seg, n_posts)
    return ag.softmax(linear(store, "vt.head", pooled), axis=-1)


def forward(store: ParamStore, cfg: ModelConfig, batch: Batch) -> ag.Tensor:
    y_tv, y_vt = crossmodal_transformer(store, cfg, batch.regions, batch.region_seg, batch.text, batch.text_seg)
    return vt_score(store, cfg, y_tv, batch.region_seg, y_vt, batch.text_seg, batch.size)
