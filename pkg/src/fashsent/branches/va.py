"""Vision/attribute composition branch: pooled projections, gated composition, score."""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..batch import Batch
from ..config import ModelConfig
from ..nn import ParamStore, add_linear, linear


def add_params(store: ParamStore, cfg: ModelConfig, rng: np.random.Generator) -> None:
    h = cfg.va_hidden
    add_linear(store, "va.proj_v", cfg.vision_dim, h, rng)
    add_linear(store, "va.proj_f", cfg.text_dim, h, rng)
    add_linear(store, "va.gate", 2 * h, h, rng)
    add_linear(store, "va.joint", 2 * h, h, rng)
    add_linear(store, "va.res_v", h, h, rng, bias=False)
    add_linear(store, "va.res_f", h, h, rng, bias=False)
    add_linear(store, "va.head", h, cfg.n_classes, rng)


def pool_project(store: ParamStore, name: str, x, seg=None, n_seg: int | None = None) -> ag.Tensor:
    """Masked mean over rows (per segment), then tanh(affine).

    With ``seg`` None, ``x`` already holds one vector per post.  A post with
    no rows pools to the zero vector.
    """
    pooled = ag.as_tensor(x) if seg is None else ag.segment_mean(x, seg, n_seg)
    return ag.tanh(linear(store, name, pooled))


def compose(store: ParamStore, p_v, p_f) -> ag.Tensor:
    both = ag.concat([p_v, p_f], axis=-1)
    gate = ag.sigmoid(linear(store, "va.gate", both))
    joint = ag.tanh(linear(store, "va.joint", both))
    residual = linear(store, "va.res_v", p_v) + linear(store, "va.res_f", p_f)
    return gate * joint + (1.0 - gate) * residual


def va_score(store: ParamStore, c) -> ag.Tensor:
    return ag.softmax(linear(store, "va.head", c), axis=-1)


def forward(store: ParamStore, cfg: ModelConfig, batch: Batch) -> ag.Tensor:
    p_v = pool_project(store, "va.proj_v", batch.globals)
    p_f = pool_project(store, "va.proj_f", batch.attr, batch.attr_seg, batch.size)
    return va_score(store, compose(store, p_v, p_f))
