"""Confusion matrices and the six multiclass evaluation metrics.

Counts are kept in exact integer arithmetic; every reported ratio is a
single final division.  Macro averages can be undefined (some class never
predicted, or never present) and are then reported as the distinct value
None, serialized as the string "NaN" -- never silently coerced to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CLASS_LABELS


class LengthMismatchError(ValueError):
    pass


class EmptyMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # K x K int64, rows = true class, columns = predicted
    class_order: tuple[str, ...] = CLASS_LABELS

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.counts))

    def to_lists(self) -> list[list[int]]:
        return self.counts.tolist()


def confusion(truth, predicted, class_order: tuple[str, ...] = CLASS_LABELS) -> ConfusionMatrix:
    """Count matrix entry (i, j) = samples with true class i predicted as j."""
    truth = np.asarray(truth, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if truth.shape != predicted.shape:
        raise LengthMismatchError(f"{truth.shape[0]} truths vs {predicted.shape[0]} predictions")
    if truth.size == 0:
        raise LengthMismatchError("no samples to evaluate")
    k = len(class_order)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (truth, predicted), 1)
    return ConfusionMatrix(counts, class_order)


@dataclass(frozen=True)
class MetricsReport:
    overall_accuracy: float
    average_accuracy: float
    micro_precision: float
    macro_precision: float | None
    micro_recall: float
    macro_recall: float | None

    _ROWS = (
        ("Overall accuracy", "overall_accuracy"),
        ("Average accuracy", "average_accuracy"),
        ("Micro-averaged precision", "micro_precision"),
        ("Macro-averaged precision", "macro_precision"),
        ("Micro-averaged recall", "micro_recall"),
        ("Macro-averaged recall", "macro_recall"),
    )

    def to_dict(self) -> dict[str, float | str]:
        out = {}
        for name, attr in self._ROWS:
            value = getattr(self, attr)
            out[attr] = "NaN" if value is None else value
        return out

    def to_text(self) -> str:
        lines = []
        for name, attr in self._ROWS:
            value = getattr(self, attr)
            rendered = "NaN" if value is None else f"{value:.6f}"
            lines.append(f"{name:<26} {rendered}")
        return "\n".join(lines)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """The six evaluation metrics of a multiclass confusion matrix.

    Of note: with one prediction per sample, micro precision and micro
    recall both equal overall accuracy, and the per-class mean of
    (TP + TN) / total collapses to 1 - 2 (1 - overall) / K.
    """
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("confusion matrix has no samples")
    k = len(cm.class_order)
    tp = np.diag(cm.counts)
    fp = cm.counts.sum(axis=0) - tp
    fn = cm.counts.sum(axis=1) - tp
    trace = int(tp.sum())

    overall = trace / total
    average = (k * total - int(fp.sum()) - int(fn.sum())) / (k * total)

    predicted_totals = tp + fp
    macro_precision = None
    if np.all(predicted_totals > 0):
        macro_precision = float(np.mean(tp / predicted_totals))
    true_totals = tp + fn
    macro_recall = None
    if np.all(true_totals > 0):
        macro_recall = float(np.mean(tp / true_totals))

    return MetricsReport(
        overall_accuracy=overall,
        average_accuracy=average,
        micro_precision=overall,
        macro_precision=macro_precision,
        micro_recall=overall,
        macro_recall=macro_recall,
    )
