"""AdamW with decoupled weight decay and the step-decay learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BASE_LR = 0.001
LR_DECAY = 0.48
LR_STEP = 10
BETAS = (0.55, 0.999)


@dataclass
class OptimizerState:
    betas: tuple[float, float] = BETAS
    eps: float = 1e-8
    weight_decay: float = 0.01
    base_lr: float = BASE_LR
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def hyper(self) -> dict:
        return {
            "betas": list(self.betas),
            "eps": self.eps,
            "weight_decay": self.weight_decay,
            "base_lr": self.base_lr,
            "t": self.t,
        }


def lr_schedule(epoch: int, base_lr: float = BASE_LR, factor: float = LR_DECAY, every: int = LR_STEP) -> float:
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    return base_lr * factor ** (epoch // every)


def adamw_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray | None],
               state: OptimizerState, lr: float) -> None:
    """One AdamW update, in place on ``params``.

    Parameters without a gradient still decay.  A non-finite gradient aborts
    before anything is modified.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    for name, g in grads.items():
        if g is not None and not np.isfinite(g).all():
            bad = int((~np.isfinite(g)).sum())
            raise FloatingPointError(f"non-finite gradient for parameter {name!r} ({bad} entries)")
    b1, b2 = state.betas
    state.t += 1
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        if state.weight_decay:
            p *= 1.0 - lr * state.weight_decay
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        if g.shape != p.shape:
            raise ValueError(f"{name}: gradient shape {g.shape} does not match parameter {p.shape}")
        m = state.m.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        denom = np.sqrt(v)
        denom *= 1.0 / np.sqrt(bc2)
        denom += state.eps
        p -= (lr / bc1) * (m / denom)
