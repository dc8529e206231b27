"""Mini-batch training, prediction and model checkpoints."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import autograd as ag
from .batch import pack
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .data import LABELS, DatasetSplit, PostRecord
from .encoders import (
    EncodedPost, SyntheticEmbeddings, TextEncoding, encode_record, provider_from_spec, provider_spec,
)
from .model import BRANCHES, MODEL_KINDS, ConfigError, FusionModel
from .optim import BASE_LR, BETAS, LR_DECAY, LR_STEP, OptimizerState, adamw_step, lr_schedule


class TrainingDiverged(FloatingPointError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 150
    batch_size: int = 32
    seed: int = 0
    kind: str = "full"
    branches: tuple[str, ...] = BRANCHES
    shuffle_tokens: bool = True
    preset: str = "paper"
    base_lr: float = BASE_LR
    lr_decay: float = LR_DECAY
    lr_step: int = LR_STEP
    betas: tuple[float, float] = BETAS
    adam_eps: float = 1e-8
    weight_decay: float = 0.01
    embedding_seed: int = 0
    # stop once train accuracy reaches this value (None trains all epochs)
    target_train_accuracy: float | None = None

    def __post_init__(self):
        self.branches = tuple(self.branches)
        self.betas = tuple(self.betas)
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        unknown = set(self.branches) - set(BRANCHES)
        if unknown:
            raise ConfigError(f"unknown branch {sorted(unknown)[0]!r}; expected some of {BRANCHES}")
        if self.kind == "full" and not self.branches:
            raise ConfigError("at least one branch must be enabled")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")

    @property
    def model_config(self) -> ModelConfig:
        return ModelConfig.preset(self.preset)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["branches"] = list(self.branches)
        d["betas"] = list(self.betas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    lr: float
    train_accuracy: float
    val_accuracy: float | None


@dataclass
class TrainLog:
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_val_accuracy: float | None = None
    fusion_weights: list[float] | None = None
    stopped_early: bool = False

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def lines(self) -> list[str]:
        out = []
        for e in self.epochs:
            val = "-" if e.val_accuracy is None else f"{e.val_accuracy:.4f}"
            out.append(f"epoch {e.epoch:3d}  loss {e.loss:.6f}  lr {e.lr:.7g}  "
                       f"train_acc {e.train_accuracy:.4f}  val_acc {val}")
        return out


def encode_all(records: Sequence[PostRecord], provider, vision_dim: int) -> list[EncodedPost]:
    return [encode_record(r, provider, vision_dim) for r in records]


def default_provider(config: TrainConfig):
    return SyntheticEmbeddings(config.model_config.embedding_sub_dim, seed=config.embedding_seed)


def _shuffled_tokens(post: EncodedPost, rng: np.random.Generator) -> EncodedPost:
    keep = np.flatnonzero(post.text.mask)
    matrix = post.text.matrix.copy()
    matrix[keep] = post.text.matrix[keep[rng.permutation(len(keep))]]
    return dataclasses.replace(post, text=TextEncoding(matrix, post.text.mask))


def score_posts(model: FusionModel, posts: Sequence[EncodedPost], batch_size: int = 64):
    """Fused scores [N x 3] and per-branch scores for encoded posts, in input order."""
    fused, branches = [], {b: [] for b in model.branches}
    with ag.no_grad():
        for lo in range(0, len(posts), batch_size):
            out = model.forward(pack(posts[lo:lo + batch_size]))
            fused.append(out.scores.data)
            for b, s in out.branches.items():
                branches[b].append(s.data)
    n_cls = model.config.n_classes
    if not fused:
        return np.zeros((0, n_cls)), {b: np.zeros((0, n_cls)) for b in branches}
    return np.concatenate(fused), {b: np.concatenate(v) for b, v in branches.items()}


def argmax_labels(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax; exact ties go to the lower class index."""
    return np.argmax(scores, axis=-1)


def _accuracy(model, posts, batch_size) -> float:
    if not posts:
        return float("nan")
    scores, _ = score_posts(model, posts, batch_size)
    return float(np.mean(argmax_labels(scores) == np.array([p.label for p in posts])))


def train(split: DatasetSplit, config: TrainConfig, provider=None) -> tuple[FusionModel, TrainLog]:
    """Train on ``split.train``; keep the parameters with the best validation accuracy."""
    if not split.train:
        raise ValueError("training split is empty")
    provider = provider or default_provider(config)
    cfg = config.model_config
    if provider.dim != cfg.text_dim:
        raise ConfigError(f"embedding width {provider.dim} does not match text_dim {cfg.text_dim}")
    model = FusionModel(config.kind, cfg, config.branches, config.seed)
    train_posts = encode_all(split.train, provider, cfg.vision_dim)
    val_posts = encode_all(split.val, provider, cfg.vision_dim)
    state = OptimizerState(config.betas, config.adam_eps, config.weight_decay, config.base_lr)
    rng = np.random.default_rng([config.seed, 2])
    params = model.params.arrays()
    log = TrainLog()
    best = None

    for epoch in range(config.epochs):
        lr = lr_schedule(epoch, config.base_lr, config.lr_decay, config.lr_step)
        order = rng.permutation(len(train_posts))
        posts = [train_posts[i] for i in order]
        if config.shuffle_tokens:
            posts = [_shuffled_tokens(p, rng) for p in posts]
        total = 0.0
        for b, lo in enumerate(range(0, len(posts), config.batch_size)):
            batch = pack(posts[lo:lo + config.batch_size])
            model.params.zero_grad()
            loss, _ = model.loss(batch)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingDiverged(f"loss became {value} at epoch {epoch}, batch {b} (lr {lr:g})")
            ag.backward(loss)
            try:
                adamw_step(params, {n: t.grad for n, t in model.params.items()}, state, lr)
            except FloatingPointError as exc:
                raise TrainingDiverged(f"epoch {epoch}, batch {b}: {exc}") from None
            total += value * batch.size
        train_acc = _accuracy(model, train_posts, config.batch_size)
        val_acc = _accuracy(model, val_posts, config.batch_size) if val_posts else None
        log.epochs.append(EpochRecord(epoch, total / len(posts), lr, train_acc, val_acc))
        # without a validation split the latest parameters are kept
        if val_acc is not None and (best is None or val_acc > log.best_val_accuracy):
            best = model.params.snapshot()
            log.best_epoch, log.best_val_accuracy = epoch, val_acc
        if config.target_train_accuracy is not None and train_acc >= config.target_train_accuracy:
            log.stopped_early = True
            break

    if best is not None:
        model.params.load(best)
    if model.kind == "full":
        with ag.no_grad():
            w = model.forward(pack(train_posts[:1])).weights
        log.fusion_weights = [float(x) for x in w.data]
    return model, log


@dataclass
class Prediction:
    id: str
    label: int
    scores: list[float]
    branch_scores: dict[str, list[float]]

    @property
    def label_name(self) -> str:
        return LABELS[self.label]


def predict_posts(model: FusionModel, posts: Sequence[EncodedPost], batch_size: int = 64) -> list[Prediction]:
    scores, branches = score_posts(model, posts, batch_size)
    labels = argmax_labels(scores)
    return [
        Prediction(p.id, int(labels[i]), scores[i].tolist(), {b: s[i].tolist() for b, s in branches.items()})
        for i, p in enumerate(posts)
    ]


def predict(model: FusionModel, record: PostRecord, provider) -> Prediction:
    return predict_posts(model, [encode_record(record, provider, model.config.vision_dim)])[0]


# ---------------------------------------------------------------- checkpoints


def save_model(path, model: FusionModel, provider, config: TrainConfig | None = None,
               extra: dict | None = None) -> None:
    meta = {
        "model": model.meta(),
        "embeddings": provider_spec(provider),
        "optimizer": {
            "name": "adamw",
            "betas": list(config.betas if config else BETAS),
            "eps": config.adam_eps if config else 1e-8,
            "weight_decay": config.weight_decay if config else 0.01,
            "base_lr": config.base_lr if config else BASE_LR,
        },
    }
    if config is not None:
        meta["train_config"] = config.to_dict()
    if extra:
        meta.update(extra)
    save_checkpoint(path, model.params.arrays(), meta)


def load_model(path):
    """Returns (model, embedding provider, checkpoint metadata)."""
    tensors, meta = load_checkpoint(path)
    model = FusionModel.from_meta(meta["model"])
    model.params.load(tensors)
    return model, provider_from_spec(meta["embeddings"]), meta
