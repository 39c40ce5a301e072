"""Confusion-matrix construction and the four classification metrics.

The positive class is 1 (stressed). Zero-denominator metrics are reported
as 0.0 and flagged as degenerate rather than raising, so reports on tiny
groups never crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import StressKitError


class LengthMismatch(StressKitError):
    pass


class EmptyInput(StressKitError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    matrix: ConfusionMatrix
    degenerate: frozenset[str] = frozenset()


def confusion(predicted: Sequence[int], actual: Sequence[int]) -> ConfusionMatrix:
    if len(predicted) != len(actual):
        raise LengthMismatch(f"{len(predicted)} predictions vs {len(actual)} labels")
    if not predicted:
        raise EmptyInput("no prediction/label pairs")
    tp = fp = tn = fn = 0
    for p, a in zip(predicted, actual):
        if p == 1 and a == 1:
            tp += 1
        elif p == 1 and a == 0:
            fp += 1
        elif p == 0 and a == 0:
            tn += 1
        elif p == 0 and a == 1:
            fn += 1
        else:
            raise ValueError(f"labels must be 0 or 1, got pair ({p!r}, {a!r})")
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(matrix: ConfusionMatrix) -> MetricsReport:
    if matrix.total <= 0:
        raise EmptyInput("confusion matrix has no counts")
    degenerate = set()

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            degenerate.add(name)
            return 0.0
        return num / den

    precision = ratio(matrix.tp, matrix.tp + matrix.fp, "precision")
    recall = ratio(matrix.tp, matrix.tp + matrix.fn, "recall")
    if precision + recall == 0:
        degenerate.add("f1")
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    accuracy = (matrix.tp + matrix.tn) / matrix.total
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        matrix=matrix,
        degenerate=frozenset(degenerate),
    )


def as_fractions(report: MetricsReport) -> dict[str, str]:
    return {
        "accuracy": f"{report.accuracy:.4f}",
        "precision": f"{report.precision:.4f}",
        "recall": f"{report.recall:.4f}",
        "f1": f"{report.f1:.4f}",
    }


def as_percentages(report: MetricsReport) -> dict[str, str]:
    return {
        "accuracy": f"{100 * report.accuracy:.2f}",
        "precision": f"{100 * report.precision:.2f}",
        "recall": f"{100 * report.recall:.2f}",
        "f1": f"{100 * report.f1:.2f}",
    }


def render_table(rows: list[tuple[str, str, MetricsReport]]) -> str:
    """Plain-text results table: one row per (features, classifier) pair."""
    header = ("Features", "ML", "Accuracy,%", "Precision", "Recall", "F score")
    body = [
        (
            feats,
            clf,
            f"{100 * rep.accuracy:.2f}",
            f"{rep.precision:.2f}",
            f"{rep.recall:.2f}",
            f"{rep.f1:.2f}",
        )
        for feats, clf, rep in rows
    ]
    widths = [max(len(str(r[i])) for r in [header, *body]) for i in range(len(header))]
    lines = []
    for row in [header, *body]:
        lines.append("  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)
