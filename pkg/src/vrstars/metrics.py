"""Rating-quality metrics and the evaluation report.

The headline metric is the macro-averaged mean absolute error over classes:
each class present in the truth contributes the mean absolute deviation of its
predictions, and the class means are averaged unweighted. Rare top and bottom
classes therefore count as much as the bulk in the middle.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .schema import N_CLASSES, validate_rating


class MetricsError(ValueError):
    """Raised for empty or misaligned prediction/truth inputs."""


def _check_pair(preds, truth) -> tuple[np.ndarray, np.ndarray]:
    preds = np.asarray(preds, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if preds.ndim != 1 or preds.shape != truth.shape:
        raise MetricsError("predictions and truth must be equal-length 1-D sequences")
    if preds.size == 0:
        raise MetricsError("cannot score an empty set")
    for v in np.concatenate([preds, truth]):
        validate_rating(int(v))
    return preds, truth


def mamae(preds, truth) -> float:
    """Macro-averaged MAE over the classes present in ``truth``."""
    preds, truth = _check_pair(preds, truth)
    per_class = []
    for cls in range(1, N_CLASSES + 1):
        mask = truth == cls
        if mask.any():
            per_class.append(np.abs(preds[mask] - cls).mean())
    return float(np.mean(per_class))


def per_class_mae(preds, truth) -> list[float | None]:
    """Length-5 list of per-class MAE; ``None`` where the class is absent."""
    preds, truth = _check_pair(preds, truth)
    out: list[float | None] = []
    for cls in range(1, N_CLASSES + 1):
        mask = truth == cls
        out.append(float(np.abs(preds[mask] - cls).mean()) if mask.any() else None)
    return out


def accuracy(preds, truth) -> float:
    preds, truth = _check_pair(preds, truth)
    return float((preds == truth).mean())


def confusion_matrix(preds, truth) -> np.ndarray:
    """5x5 count matrix; rows index the true class, columns the prediction."""
    preds, truth = _check_pair(preds, truth)
    mat = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(mat, (truth - 1, preds - 1), 1)
    return mat


def weighted_f1(preds, truth) -> float:
    """Support-weighted mean of per-class F1 over classes present in truth."""
    preds, truth = _check_pair(preds, truth)
    mat = confusion_matrix(preds, truth)
    support = mat.sum(axis=1)
    total = 0.0
    for cls in range(N_CLASSES):
        if support[cls] == 0:
            continue
        tp = mat[cls, cls]
        fp = mat[:, cls].sum() - tp
        fn = support[cls] - tp
        denom = 2 * tp + fp + fn
        f1 = (2 * tp / denom) if denom else 0.0
        total += support[cls] * f1
    return float(total / support.sum())


@dataclass
class EvalReport:
    """Everything the evaluate step reports, serializable to ``report.json``."""

    mamae: float
    weighted_f1: float
    accuracy: float
    per_class_mae: list[float | None]
    confusion: list[list[int]]

    def to_dict(self) -> dict:
        return {
            "mamae": self.mamae,
            "weighted_f1": self.weighted_f1,
            "accuracy": self.accuracy,
            "per_class_mae": self.per_class_mae,
            "confusion": self.confusion,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


def evaluate_ratings(preds, truth) -> EvalReport:
    return EvalReport(
        mamae=mamae(preds, truth),
        weighted_f1=weighted_f1(preds, truth),
        accuracy=accuracy(preds, truth),
        per_class_mae=per_class_mae(preds, truth),
        confusion=[[int(v) for v in row] for row in confusion_matrix(preds, truth)],
    )


def format_report(report: EvalReport) -> str:
    """Fixed-width text rendering of an :class:`EvalReport`."""
    lines = [
        f"{'MAMAE':<14}{report.mamae:>10.4f}",
        f"{'weighted F1':<14}{report.weighted_f1:>10.4f}",
        f"{'accuracy':<14}{report.accuracy:>10.4f}",
        "",
        f"{'class':<7}{'MAE':>8}",
    ]
    for cls in range(N_CLASSES):
        mae = report.per_class_mae[cls]
        lines.append(f"{cls + 1:<7}{'-' if mae is None else format(mae, '.4f'):>8}")
    lines.append("")
    lines.append("confusion (rows = truth, cols = predicted)")
    header = "     " + "".join(f"{c + 1:>7}" for c in range(N_CLASSES))
    lines.append(header)
    for cls in range(N_CLASSES):
        row = "".join(f"{v:>7}" for v in report.confusion[cls])
        lines.append(f"{cls + 1:<5}{row}")
    return "\n".join(lines)


def mode_class(labels) -> int:
    """Most frequent rating class, ties resolved toward the lower class."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise MetricsError("cannot take the mode of an empty label set")
    for v in labels:
        validate_rating(int(v))
    counts = np.bincount(labels, minlength=N_CLASSES + 1)[1:]
    return int(np.argmax(counts)) + 1


class ModeClassifier(BaseEstimator, ClassifierMixin):
    """Constant baseline that always predicts the majority training class."""

    def fit(self, X, y):
        self.mode_ = mode_class(y)
        self.classes_ = np.unique(np.asarray(y, dtype=np.int64))
        return self

    def predict(self, X) -> np.ndarray:
        n = len(X)
        return np.full(n, self.mode_, dtype=np.int64)
