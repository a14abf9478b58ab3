"""Confusion matrices and macro-averaged precision/recall/F1."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyMatrix, LabelOutOfRange


@dataclass(frozen=True)
class ClassMetrics:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    descriptor: dict
    class_names: tuple[str, ...]
    confusion: np.ndarray
    per_class: tuple[ClassMetrics, ...]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float


def confusion(true_labels, predicted_labels, class_count: int) -> np.ndarray:
    """Row = true class, column = predicted class, integer counts."""
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise DimensionMismatch(
            f"label arrays differ in length: {t.shape} vs {p.shape}"
        )
    if t.size and (t.min() < 0 or t.max() >= class_count
                   or p.min() < 0 or p.max() >= class_count):
        raise LabelOutOfRange(f"labels must lie in [0, {class_count})")
    cm = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


def macro_metrics(cm: np.ndarray, class_names=None):
    """Per-class and macro P/R/F1 from a confusion matrix.

    Zero-denominator classes score 0 (the conservative convention).
    Returns (per_class tuple, macro_precision, macro_recall, macro_f1,
    accuracy).
    """
    cm = np.asarray(cm, dtype=np.int64)
    total = int(cm.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix has no observations")
    c = cm.shape[0]
    names = tuple(class_names) if class_names else tuple(str(i) for i in range(c))
    tp = np.diag(cm).astype(np.float64)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    per_class = []
    for i in range(c):
        prec = tp[i] / (tp[i] + fp[i]) if tp[i] + fp[i] > 0 else 0.0
        rec = tp[i] / (tp[i] + fn[i]) if tp[i] + fn[i] > 0 else 0.0
        f1 = 2.0 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
        per_class.append(
            ClassMetrics(
                name=names[i],
                precision=float(prec),
                recall=float(rec),
                f1=float(f1),
                support=int(cm[i].sum()),
            )
        )
    macro_p = float(np.mean([m.precision for m in per_class]))
    macro_r = float(np.mean([m.recall for m in per_class]))
    macro_f = float(np.mean([m.f1 for m in per_class]))
    accuracy = float(tp.sum() / total)
    return tuple(per_class), macro_p, macro_r, macro_f, accuracy


def build_report(descriptor: dict, cm: np.ndarray, class_names) -> EvalReport:
    per_class, macro_p, macro_r, macro_f, acc = macro_metrics(cm, class_names)
    return EvalReport(
        descriptor=dict(descriptor),
        class_names=tuple(class_names),
        confusion=cm,
        per_class=per_class,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
        accuracy=acc,
    )


def per_disease_f1(report: EvalReport):
    """Weakest classes first: (name, f1) ascending by score, ties by name."""
    pairs = [(m.name, m.f1) for m in report.per_class]
    pairs.sort(key=lambda t: (t[1], t[0]))
    return pairs
