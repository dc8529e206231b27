"""Full three-branch model, score fusion and the pooled baselines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import autograd as ag
from .batch import Batch
from .branches import ta, va, vt
from .config import ModelConfig
from .nn import ParamStore, add_linear, linear

BRANCHES = ("va", "ta", "vt")
MODEL_KINDS = ("full", "early", "late", "text-only", "image-only", "attr-only")
_BRANCH_MODULES = {"va": va, "ta": ta, "vt": vt}


class ConfigError(ValueError):
    pass


def fusion_weights(omega, enabled: Sequence[bool]) -> ag.Tensor:
    """Softmax of the fusion logits over enabled branches; disabled weights are exactly 0."""
    enabled = np.asarray(enabled, dtype=bool)
    if not enabled.any():
        raise ConfigError("at least one branch must be enabled")
    return ag.masked_softmax(omega, axis=-1, mask=enabled)


def mix_scores(scores: Sequence, weights) -> ag.Tensor:
    """Convex combination sum_i w_i * scores[i]; ``None`` entries count as uniform."""
    weights = ag.as_tensor(weights)
    ref = next(s for s in scores if s is not None)
    n_cls = ref.shape[-1]
    out = None
    for i, s in enumerate(scores):
        s = ag.Tensor(np.full(ref.shape, 1.0 / n_cls)) if s is None else ag.as_tensor(s)
        term = weights[i] * s
        out = term if out is None else out + term
    return out


def combine_scores(scores: Sequence, omega, enabled: Sequence[bool] = (True, True, True)) -> ag.Tensor:
    return mix_scores(scores, fusion_weights(omega, enabled))


@dataclass
class ModelOutput:
    scores: ag.Tensor                      # [B x 3] fused
    branches: dict[str, ag.Tensor] = field(default_factory=dict)
    weights: ag.Tensor | None = None


def _pooled(batch: Batch):
    return (
        ag.segment_mean(batch.regions, batch.region_seg, batch.size),
        ag.segment_mean(batch.text, batch.text_seg, batch.size),
        ag.segment_mean(batch.attr, batch.attr_seg, batch.size),
    )


def baseline_early_fusion(store: ParamStore, batch: Batch) -> ag.Tensor:
    joint = ag.concat(list(_pooled(batch)), axis=1)
    return ag.softmax(linear(store, "early.head", joint), axis=-1)


def baseline_late_fusion(store: ParamStore, batch: Batch) -> ag.Tensor:
    vis, txt, att = _pooled(batch)
    heads = [
        ag.softmax(linear(store, "late.vision", vis), axis=-1),
        ag.softmax(linear(store, "late.text", txt), axis=-1),
        ag.softmax(linear(store, "late.attr", att), axis=-1),
    ]
    return (heads[0] + heads[1] + heads[2]) / 3.0


def baseline_unimodal(store: ParamStore, batch: Batch, modality: str) -> ag.Tensor:
    vis, txt, att = _pooled(batch)
    pooled = {"vision": vis, "text": txt, "attr": att}[modality]
    return ag.softmax(linear(store, f"uni.{modality}", pooled), axis=-1)


_UNIMODAL = {"text-only": "text", "image-only": "vision", "attr-only": "attr"}


class FusionModel:
    """Parameters plus forward pass for one model kind.

    ``kind`` is ``full`` (the three-branch model, restricted to ``branches``)
    or one of the pooled baselines.
    """

    def __init__(self, kind: str = "full", config: ModelConfig | None = None,
                 branches: Sequence[str] = BRANCHES, seed: int = 0):
        if kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
        branches = tuple(b for b in BRANCHES if b in set(branches))
        if kind == "full" and not branches:
            raise ConfigError("at least one branch must be enabled")
        self.kind = kind
        self.config = config or ModelConfig()
        self.branches = branches if kind == "full" else ()
        self.seed = seed
        self.params = ParamStore()
        rng = np.random.default_rng(seed)
        cfg = self.config
        n = cfg.n_classes
        if kind == "full":
            for b in self.branches:
                _BRANCH_MODULES[b].add_params(self.params, cfg, rng)
            self.params.add("fusion.omega", np.zeros(len(BRANCHES)))
        elif kind == "early":
            add_linear(self.params, "early.head", cfg.vision_dim + 2 * cfg.text_dim, n, rng)
        elif kind == "late":
            add_linear(self.params, "late.vision", cfg.vision_dim, n, rng)
            add_linear(self.params, "late.text", cfg.text_dim, n, rng)
            add_linear(self.params, "late.attr", cfg.text_dim, n, rng)
        else:
            modality = _UNIMODAL[kind]
            width = cfg.vision_dim if modality == "vision" else cfg.text_dim
            add_linear(self.params, f"uni.{modality}", width, n, rng)

    @property
    def enabled(self) -> tuple[bool, ...]:
        return tuple(b in self.branches for b in BRANCHES)

    def forward(self, batch: Batch) -> ModelOutput:
        if self.kind == "early":
            return ModelOutput(baseline_early_fusion(self.params, batch))
        if self.kind == "late":
            return ModelOutput(baseline_late_fusion(self.params, batch))
        if self.kind != "full":
            return ModelOutput(baseline_unimodal(self.params, batch, _UNIMODAL[self.kind]))
        branch_scores = {b: _BRANCH_MODULES[b].forward(self.params, self.config, batch) for b in self.branches}
        w = fusion_weights(self.params["fusion.omega"], self.enabled)
        fused = mix_scores([branch_scores.get(b) for b in BRANCHES], w)
        return ModelOutput(fused, branch_scores, w)

    def loss(self, batch: Batch) -> tuple[ag.Tensor, ModelOutput]:
        if batch.labels is None:
            raise ValueError("batch has unlabelled posts")
        out = self.forward(batch)
        return ag.cross_entropy(out.scores, batch.labels), out

    def meta(self) -> dict:
        return {
            "kind": self.kind,
            "branches": list(self.branches),
            "config": self.config.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "FusionModel":
        return cls(meta["kind"], ModelConfig.from_dict(meta["config"]), meta["branches"] or BRANCHES, meta["seed"])
