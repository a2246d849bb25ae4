"""Metrics, confusion matrices, model-disagreement analysis, and rendering.

All metrics use the fixed class order (positive, negative, neutral, mixed).
Micro F1 is pooled-count F1, which for single-label multiclass equals
accuracy; macro F1 is the unweighted mean over all four classes with the
0/0 -> 0 convention per class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Label, LABEL_ORDER

_LABEL_INDEX = {label: i for i, label in enumerate(LABEL_ORDER)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """4x4 counts, rows = gold, columns = predicted."""

    counts: np.ndarray

    def __post_init__(self):
        if self.counts.shape != (4, 4):
            raise ValueError("confusion matrix must be 4x4")

    @property
    def n(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClassMetrics:
    label: Label
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    per_class: tuple[ClassMetrics, ...]
    micro_f1: float
    macro_f1: float
    n: int


@dataclass(frozen=True)
class DisagreementReport:
    n_total: int
    n_disagree: int
    a_correct_in_disagree: int
    b_correct_in_disagree: int
    n_agree: int
    agree_correct: int


def confusion_matrix(golds: Sequence[Label], preds: Sequence[Label]) -> ConfusionMatrix:
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} golds vs {len(preds)} preds")
    counts = np.zeros((4, 4), dtype=np.int64)
    for gold, pred in zip(golds, preds):
        counts[_LABEL_INDEX[gold], _LABEL_INDEX[pred]] += 1
    return ConfusionMatrix(counts=counts)


def _safe_div(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def per_class_prf(cm: ConfusionMatrix) -> tuple[ClassMetrics, ...]:
    """Per-class precision/recall/F1 with the 0/0 -> 0 convention."""
    metrics = []
    for i, label in enumerate(LABEL_ORDER):
        tp = int(cm.counts[i, i])
        fp = int(cm.counts[:, i].sum()) - tp
        fn = int(cm.counts[i, :].sum()) - tp
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        metrics.append(ClassMetrics(label=label, precision=precision,
                                    recall=recall, f1=f1))
    return tuple(metrics)


def micro_f1(cm: ConfusionMatrix) -> float:
    """Pooled-count F1 = sum of diagonal / n (equals accuracy here)."""
    n = cm.n
    if n == 0:
        raise ValueError("micro F1 undefined for zero examples")
    return int(np.trace(cm.counts)) / n


def macro_f1(cm: ConfusionMatrix) -> float:
    """Unweighted mean of the four per-class F1 values."""
    metrics = per_class_prf(cm)
    return sum(m.f1 for m in metrics) / len(metrics)


def evaluate(golds: Sequence[Label], preds: Sequence[Label]) -> EvalReport:
    cm = confusion_matrix(golds, preds)
    return EvalReport(per_class=per_class_prf(cm), micro_f1=micro_f1(cm),
                      macro_f1=macro_f1(cm), n=cm.n)


def disagreement_report(preds_a: Sequence[Label], preds_b: Sequence[Label],
                        golds: Sequence[Label]) -> DisagreementReport:
    """Partition examples by model agreement and count who was right where."""
    if not (len(preds_a) == len(preds_b) == len(golds)):
        raise ValueError("preds_a, preds_b, and golds must have equal length")
    n_disagree = a_correct = b_correct = n_agree = agree_correct = 0
    for a, b, gold in zip(preds_a, preds_b, golds):
        if a == b:
            n_agree += 1
            if a == gold:
                agree_correct += 1
        else:
            n_disagree += 1
            if a == gold:
                a_correct += 1
            if b == gold:
                b_correct += 1
    return DisagreementReport(n_total=len(golds), n_disagree=n_disagree,
                              a_correct_in_disagree=a_correct,
                              b_correct_in_disagree=b_correct,
                              n_agree=n_agree, agree_correct=agree_correct)


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _render_confusion(cm: ConfusionMatrix, fmt: str) -> str:
    names = [label.value for label in LABEL_ORDER]
    if fmt == "csv":
        lines = ["gold," + ",".join(names)]
        for i, name in enumerate(names):
            lines.append(name + "," + ",".join(str(int(c)) for c in cm.counts[i]))
        return "\n".join(lines) + "\n"
    width = max(len(n) for n in names) + 2
    header = " " * width + "".join(n.rjust(width) for n in names)
    lines = [header]
    for i, name in enumerate(names):
        row = name.ljust(width) + "".join(str(int(c)).rjust(width) for c in cm.counts[i])
        lines.append(row)
    return "\n".join(lines) + "\n"


def _render_eval(report: EvalReport, fmt: str) -> str:
    if fmt == "csv":
        lines = ["class,precision,recall,f1"]
        for m in report.per_class:
            lines.append(f"{m.label.value},{_fmt(m.precision)},{_fmt(m.recall)},{_fmt(m.f1)}")
        lines.append(f"micro_f1,{_fmt(report.micro_f1)}")
        lines.append(f"macro_f1,{_fmt(report.macro_f1)}")
        lines.append(f"n,{report.n}")
        return "\n".join(lines) + "\n"
    lines = [f"{'class':<10}{'precision':>11}{'recall':>11}{'f1':>11}"]
    for m in report.per_class:
        lines.append(f"{m.label.value:<10}{_fmt(m.precision):>11}"
                     f"{_fmt(m.recall):>11}{_fmt(m.f1):>11}")
    lines.append(f"micro F1: {_fmt(report.micro_f1)}")
    lines.append(f"macro F1: {_fmt(report.macro_f1)}")
    lines.append(f"n: {report.n}")
    return "\n".join(lines) + "\n"


def _render_disagreement(report: DisagreementReport, fmt: str) -> str:
    fields = [
        ("n_total", report.n_total),
        ("n_disagree", report.n_disagree),
        ("a_correct_in_disagree", report.a_correct_in_disagree),
        ("b_correct_in_disagree", report.b_correct_in_disagree),
        ("n_agree", report.n_agree),
        ("agree_correct", report.agree_correct),
    ]
    if fmt == "csv":
        return "field,value\n" + "\n".join(f"{k},{v}" for k, v in fields) + "\n"
    width = max(len(k) for k, _ in fields)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in fields) + "\n"


def render_report(obj, fmt: str = "text") -> str:
    """Deterministic text or CSV rendering of any report object.

    Accepts ConfusionMatrix, EvalReport, DisagreementReport, LabelStats,
    or an ablation table (anything with a `rows` attribute of condition
    rows). Reals are printed with 4 decimals.
    """
    if fmt not in ("text", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, ConfusionMatrix):
        return _render_confusion(obj, fmt)
    if isinstance(obj, EvalReport):
        return _render_eval(obj, fmt)
    if isinstance(obj, DisagreementReport):
        return _render_disagreement(obj, fmt)
    if hasattr(obj, "counts") and hasattr(obj, "total"):
        rows = [(label.value, obj.counts[label]) for label in LABEL_ORDER]
        if fmt == "csv":
            return ("label,count\n"
                    + "\n".join(f"{k},{v}" for k, v in rows)
                    + f"\ntotal,{obj.total}\n")
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        lines.append(f"{'total'.ljust(width)}  {obj.total}")
        return "\n".join(lines) + "\n"
    if hasattr(obj, "rows"):
        header = ["condition", "micro_f1", "macro_f1", "val_f1"]
        rows = [(r.condition, _fmt(r.micro_f1), _fmt(r.macro_f1), _fmt(r.val_f1))
                for r in obj.rows]
        if fmt == "csv":
            return ",".join(header) + "\n" + "\n".join(",".join(r) for r in rows) + "\n"
        width = max(len(r[0]) for r in rows + [tuple(header)])
        lines = [f"{header[0].ljust(width)}  {header[1]:>9}  {header[2]:>9}  {header[3]:>9}"]
        for r in rows:
            lines.append(f"{r[0].ljust(width)}  {r[1]:>9}  {r[2]:>9}  {r[3]:>9}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot render object of type {type(obj).__name__}")
