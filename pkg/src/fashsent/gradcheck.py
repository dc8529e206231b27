"""Central finite-difference checks of the analytic gradients.

Each parameter tensor (or op input) is one group.  A handful of random
coordinates per group is perturbed by +-eps; a coordinate whose step flips a
relu on or off is resampled, since the difference quotient across a kink
says nothing about the derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import autograd as ag
from .batch import pack
from .config import ModelConfig
from .data import generate_synthetic
from .encoders import SyntheticEmbeddings, encode_record
from .model import FusionModel
from .nn import ParamStore, add_attention, multi_head_attention

TOL = 1e-4
EPS = 1e-5
DENOM_FLOOR = 1e-6
SCOPES = ("op", "branch", "full")


def relative_error(analytic: float, numeric: float, floor: float = DENOM_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


@dataclass
class GroupResult:
    group: str
    max_rel_err: float
    checked: int
    skipped: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.max_rel_err < self.tol


@dataclass
class GradReport:
    scope: str
    seed: int
    eps: float
    tol: float
    groups: list[GroupResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.groups)

    @property
    def max_rel_err(self) -> float:
        return max((g.max_rel_err for g in self.groups), default=0.0)

    def failures(self) -> list[str]:
        return [g.group for g in self.groups if not g.passed]

    def lines(self) -> list[str]:
        out = []
        for g in self.groups:
            status = "PASS" if g.passed else "FAIL"
            out.append(f"{status} {g.group:<40s} max_rel_err={g.max_rel_err:.3e} "
                       f"checked={g.checked} skipped_kinks={g.skipped}")
        return out


def check_gradients(loss_fn: Callable[[], ag.Tensor], tensors: dict[str, ag.Tensor], *,
                    eps: float = EPS, tol: float = TOL, coords: int = 4,
                    rng: np.random.Generator | None = None, corrupt: str | None = None) -> list[GroupResult]:
    """Compare backprop gradients of ``loss_fn()`` with central differences."""
    rng = rng or np.random.default_rng(0)
    for t in tensors.values():
        t.grad = None
    ag.backward(loss_fn())
    analytic = {n: (t.grad.copy() if t.grad is not None else np.zeros_like(t.data)) for n, t in tensors.items()}
    if corrupt is not None:
        if corrupt not in analytic:
            raise KeyError(f"no gradient group named {corrupt!r}")
        analytic[corrupt] = analytic[corrupt] + 1e-2 * (1.0 + np.abs(analytic[corrupt]))

    def evaluate():
        with ag.no_grad(), ag.kink_probe() as kinks:
            value = loss_fn().item()
        return value, kinks

    results = []
    for name, t in tensors.items():
        flat = t.data.reshape(-1)
        order = rng.permutation(t.size)
        want = min(coords, t.size)
        worst, checked, skipped = 0.0, 0, 0
        for idx in order:
            if checked >= want:
                break
            orig = flat[idx]
            flat[idx] = orig + eps
            lp, kp = evaluate()
            flat[idx] = orig - eps
            lm, km = evaluate()
            flat[idx] = orig
            if kp != km:
                skipped += 1
                continue
            numeric = (lp - lm) / (2 * eps)
            worst = max(worst, relative_error(float(analytic[name].reshape(-1)[idx]), numeric))
            checked += 1
        results.append(GroupResult(name, worst, checked, skipped, tol))
    return results


# ---------------------------------------------------------------- op scope


def _op_cases(rng: np.random.Generator) -> dict[str, tuple[Callable, list[tuple]]]:
    mask = rng.random((3, 5)) < 0.7
    mask[:, 0] = True
    seg = np.array([0, 2, 0, 1, 2, 2])
    att = ParamStore()
    add_attention(att, "mha", 6, 4, 8, 2, rng)
    key_mask = rng.random((3, 5)) < 0.6
    key_mask[:, 1] = True

    def mha(q, kv):
        return multi_head_attention(att, "mha", q, kv, 2, key_mask)

    return {
        "matmul": (lambda a, b: ag.matmul(a, b), [(3, 4), (4, 5)]),
        "matmul_batched": (lambda a, b: ag.matmul(a, b), [(2, 3, 4), (2, 4, 3)]),
        "matmul_vector": (lambda a, b: ag.matmul(a, b), [(3, 4), (4,)]),
        "add_broadcast": (lambda a, b: a + b, [(3, 4), (4,)]),
        "mul_div": (lambda a, b: a * b / (2.5 + b), [(3, 4), (3, 1)]),
        "tanh": (ag.tanh, [(4, 5)]),
        "sigmoid": (ag.sigmoid, [(4, 5)]),
        "relu": (ag.relu, [(4, 5)]),
        "exp_log": (lambda a: ag.log(ag.exp(a) + 1.0), [(4, 5)]),
        "sum_mean": (lambda a: ag.sum_(a, axis=0) * ag.mean(a, axis=1, keepdims=True), [(3, 3)]),
        "reshape_transpose": (lambda a: ag.transpose(ag.reshape(a, (2, 3, 2)), (1, 0, 2)), [(3, 4)]),
        "concat_getitem": (lambda a, b: ag.concat([a[1:], b], axis=0)[:, 1:], [(3, 4), (2, 4)]),
        "softmax": (lambda a: ag.softmax(a, axis=-1), [(3, 5)]),
        "masked_softmax": (lambda a: ag.masked_softmax(a, axis=1, mask=mask), [(3, 5)]),
        "layer_norm": (lambda a, g, b: ag.layer_norm(a, g, b, 1e-5), [(4, 6), (6,), (6,)]),
        "segment_mean": (lambda a: ag.segment_mean(a, seg, 4), [(6, 3)]),
        "multi_head_attention": (mha, [(3, 6), (5, 4)]),
        "cross_entropy": (lambda a: ag.cross_entropy(ag.softmax(a, axis=-1), np.array([0, 2, 1])), [(3, 3)]),
    }


OPS = tuple(_op_cases(np.random.default_rng(0)))


def _check_op(name: str, rng: np.random.Generator, eps, tol, coords, corrupt) -> GroupResult:
    fn, shapes = _op_cases(rng)[name]
    inputs = {f"{name}[{i}]": ag.Tensor(rng.uniform(-1, 1, s), requires_grad=True) for i, s in enumerate(shapes)}
    probe = fn(*inputs.values())
    weights = rng.standard_normal(probe.shape)

    def loss():
        return ag.sum_(fn(*inputs.values()) * weights)

    parts = check_gradients(loss, inputs, eps=eps, tol=tol, coords=coords, rng=rng,
                            corrupt=None if corrupt is None else f"{name}[0]" if corrupt == name else None)
    return GroupResult(
        name,
        max(p.max_rel_err for p in parts),
        sum(p.checked for p in parts),
        sum(p.skipped for p in parts),
        tol,
    )


# ---------------------------------------------------------------- model scopes

BRANCH_TARGETS = ("va", "ta", "vt", "fusion", "early", "late", "text-only", "image-only", "attr-only")


def _model_for(target: str, cfg: ModelConfig, seed: int) -> FusionModel:
    if target in ("va", "ta", "vt"):
        return FusionModel("full", cfg, branches=(target,), seed=seed)
    if target in ("fusion", "full"):
        model = FusionModel("full", cfg, seed=seed)
        model.params["fusion.omega"].data[:] = np.random.default_rng(seed).normal(0, 1, 3)
        return model
    return FusionModel(target, cfg, seed=seed)


def check_model(target: str, seed: int = 0, n_posts: int = 4, eps: float = EPS, tol: float = TOL,
                coords: int = 4, corrupt: str | None = None, config: ModelConfig | None = None) -> list[GroupResult]:
    cfg = config or ModelConfig.small()
    model = _model_for(target, cfg, seed)
    provider = SyntheticEmbeddings(cfg.embedding_sub_dim, seed=seed)
    records = generate_synthetic(n_posts, seed, 1.0, vision_dim=cfg.vision_dim)
    batch = pack([encode_record(r, provider, cfg.vision_dim) for r in records])
    rng = np.random.default_rng([seed, 7])
    if target in ("va", "ta", "vt"):
        def loss():
            return ag.cross_entropy(model.forward(batch).branches[target], batch.labels)
    else:
        def loss():
            return model.loss(batch)[0]
    tensors = dict(model.params.items())
    if target == "fusion":
        tensors = {"fusion.omega": model.params["fusion.omega"]}
    return check_gradients(loss, tensors, eps=eps, tol=tol, coords=coords, rng=rng, corrupt=corrupt)


def grad_check(scope: str, seed: int = 0, eps: float = EPS, tol: float = TOL, target: str | None = None,
               coords: int = 4, corrupt: str | None = None, config: ModelConfig | None = None,
               n_posts: int = 4) -> GradReport:
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}; expected one of {SCOPES}")
    report = GradReport(scope, seed, eps, tol)
    if scope == "op":
        names = OPS if target is None else (target,)
        for name in names:
            if name not in OPS:
                raise ValueError(f"unknown op {name!r}; expected one of {OPS}")
            report.groups.append(_check_op(name, np.random.default_rng([seed, len(report.groups)]),
                                           eps, tol, coords, corrupt))
    elif scope == "branch":
        targets = BRANCH_TARGETS if target is None else (target,)
        for t in targets:
            if t not in BRANCH_TARGETS:
                raise ValueError(f"unknown branch {t!r}; expected one of {BRANCH_TARGETS}")
            for g in check_model(t, seed, n_posts, eps, tol, coords, corrupt, config):
                g.group = f"{t}:{g.group}"
                report.groups.append(g)
    else:
        report.groups.extend(check_model("full", seed, n_posts, eps, tol, coords, corrupt, config))
    return report
