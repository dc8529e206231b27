"""Accuracy, macro precision / recall / F1 and multi-seed aggregation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import LABELS

N_CLASSES = len(LABELS)
METRIC_NAMES = ("accuracy", "macro_precision", "macro_recall", "macro_f1")


@dataclass
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class_accuracy: list[float]
    confusion: list[list[int]]   # rows gold, columns predicted
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_class_accuracy": dict(zip(LABELS, self.per_class_accuracy)),
            "confusion": self.confusion,
            "n": self.n,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [f"{'metric':<18s}{'value':>8s}"]
        for name in METRIC_NAMES:
            rows.append(f"{name:<18s}{getattr(self, name):>8.4f}")
        for label, acc in zip(LABELS, self.per_class_accuracy):
            rows.append(f"{'acc_' + label:<18s}{acc:>8.4f}")
        rows.append(f"{'samples':<18s}{self.n:>8d}")
        rows.append("confusion (rows gold, cols predicted): " + " ".join(LABELS))
        rows.extend("  " + " ".join(f"{c:>6d}" for c in row) for row in self.confusion)
        return "\n".join(rows) + "\n"


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def confusion_matrix(preds: Sequence[int], golds: Sequence[int], n_classes: int = N_CLASSES) -> np.ndarray:
    preds = np.asarray(preds, dtype=np.intp)
    golds = np.asarray(golds, dtype=np.intp)
    if preds.shape != golds.shape:
        raise ValueError(f"length mismatch: {preds.size} predictions vs {golds.size} labels")
    if preds.size == 0:
        raise ValueError("cannot score an empty prediction list")
    for what, arr in (("prediction", preds), ("label", golds)):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise ValueError(f"{what} outside 0..{n_classes - 1}")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (golds, preds), 1)
    return cm


def compute_metrics(preds: Sequence[int], golds: Sequence[int]) -> MetricsReport:
    """Undefined precision or recall (0/0) counts as 0."""
    cm = confusion_matrix(preds, golds)
    tp = np.diag(cm).astype(np.float64)
    precision = _safe_div(tp, cm.sum(axis=0).astype(np.float64))
    recall = _safe_div(tp, cm.sum(axis=1).astype(np.float64))
    f1 = _safe_div(2 * precision * recall, precision + recall)
    n = int(cm.sum())
    return MetricsReport(
        accuracy=float(tp.sum() / n),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        per_class_accuracy=[float(r) for r in recall],
        confusion=cm.tolist(),
        n=n,
    )


@dataclass
class Aggregate:
    mean: dict[str, float]
    std: dict[str, float]
    n_runs: int

    def formatted(self) -> dict[str, str]:
        return {k: f"{self.mean[k]:.2f}±{self.std[k]:.2f}" for k in self.mean}

    def lines(self) -> list[str]:
        return [f"{k}: {v}" for k, v in self.formatted().items()]


def aggregate_runs(reports: Sequence[MetricsReport]) -> Aggregate:
    """Mean and population standard deviation of each headline metric."""
    if len(reports) < 2:
        raise ValueError(f"need at least 2 runs to aggregate, got {len(reports)}")
    names = list(METRIC_NAMES) + [f"acc_{label}" for label in LABELS]
    values = {name: [] for name in names}
    for r in reports:
        for name in METRIC_NAMES:
            values[name].append(getattr(r, name))
        for label, acc in zip(LABELS, r.per_class_accuracy):
            values[f"acc_{label}"].append(acc)
    return Aggregate(
        mean={k: float(np.mean(v)) for k, v in values.items()},
        std={k: float(np.std(v)) for k, v in values.items()},
        n_runs=len(reports),
    )
