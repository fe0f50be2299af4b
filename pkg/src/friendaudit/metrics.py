"""Evaluation metrics: confusion matrices, per-class P/R/F, chi-square, Pearson r.

All functions are pure. Weighted averages weight each class by its actual
support (row sums); unweighted (macro) averages are emitted alongside since
some published tables report one or the other for 3-class targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from friendaudit.domain import FriendAuditError


class UnknownLabelError(FriendAuditError):
    pass


class EmptyMatrixError(FriendAuditError):
    pass


class DegenerateMarginError(FriendAuditError):
    pass


class ZeroVarianceError(FriendAuditError):
    pass


class LengthMismatchError(FriendAuditError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count grid; rows are actual classes, columns are predicted."""

    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.classes)
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError("counts must be square with dimension |classes|")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def col_sums(self) -> tuple[int, ...]:
        return tuple(sum(row[j] for row in self.counts) for j in range(len(self.classes)))

    def to_text(self) -> str:
        width = max(
            [len(c) for c in self.classes] + [len(str(c)) for row in self.counts for c in row]
        )
        header = " " * (width + 2) + " ".join(c.rjust(width) for c in self.classes)
        lines = [header]
        for cls, row in zip(self.classes, self.counts):
            lines.append(
                cls.rjust(width) + "  " + " ".join(str(c).rjust(width) for c in row)
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "counts": [list(r) for r in self.counts]}


def confusion_matrix(
    pairs: Sequence[tuple[str, str]], classes: Sequence[str]
) -> ConfusionMatrix:
    """Tally (actual, predicted) label pairs into a matrix."""
    index = {c: i for i, c in enumerate(classes)}
    grid = [[0] * len(classes) for _ in classes]
    for actual, predicted in pairs:
        if actual not in index:
            raise UnknownLabelError(f"actual label {actual!r} not in classes")
        if predicted not in index:
            raise UnknownLabelError(f"predicted label {predicted!r} not in classes")
        grid[index[actual]][index[predicted]] += 1
    return ConfusionMatrix(tuple(classes), tuple(tuple(row) for row in grid))


@dataclass(frozen=True)
class ClassMetrics:
    classes: tuple[str, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f_measure: tuple[float, ...]
    weighted_avg: tuple[float, float, float]
    macro_avg: tuple[float, float, float]

    def for_class(self, cls: str) -> tuple[float, float, float]:
        i = self.classes.index(cls)
        return (self.precision[i], self.recall[i], self.f_measure[i])

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "precision": list(self.precision),
            "recall": list(self.recall),
            "f_measure": list(self.f_measure),
            "weighted_avg": list(self.weighted_avg),
            "macro_avg": list(self.macro_avg),
        }

    def to_text(self) -> str:
        lines = [f"{'class':>14}  {'prec':>6}  {'rec':>6}  {'f':>6}"]
        for i, cls in enumerate(self.classes):
            lines.append(
                f"{cls:>14}  {self.precision[i]:6.3f}  {self.recall[i]:6.3f}  "
                f"{self.f_measure[i]:6.3f}"
            )
        w = self.weighted_avg
        m = self.macro_avg
        lines.append(f"{'weighted avg':>14}  {w[0]:6.3f}  {w[1]:6.3f}  {w[2]:6.3f}")
        lines.append(f"{'macro avg':>14}  {m[0]:6.3f}  {m[1]:6.3f}  {m[2]:6.3f}")
        return "\n".join(lines)


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def class_metrics(m: ConfusionMatrix) -> ClassMetrics:
    """Per-class precision/recall/F plus support-weighted and macro averages.

    An empty predicted column yields precision 0; an empty actual row yields
    recall 0 (both edge cases must be total).
    """
    rows = m.row_sums()
    cols = m.col_sums()
    if m.total == 0:
        raise EmptyMatrixError("confusion matrix has no observations")
    precision, recall, f_measure = [], [], []
    for i in range(len(m.classes)):
        diag = m.counts[i][i]
        p = diag / cols[i] if cols[i] > 0 else 0.0
        r = diag / rows[i] if rows[i] > 0 else 0.0
        precision.append(p)
        recall.append(r)
        f_measure.append(_f1(p, r))
    total = sum(rows)
    weighted = tuple(
        sum(v * s for v, s in zip(vals, rows)) / total
        for vals in (precision, recall, f_measure)
    )
    macro = tuple(sum(vals) / len(vals) for vals in (precision, recall, f_measure))
    return ClassMetrics(
        m.classes,
        tuple(precision),
        tuple(recall),
        tuple(f_measure),
        weighted,  # type: ignore[arg-type]
        macro,  # type: ignore[arg-type]
    )


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float


def chi_square_2x2(table: Sequence[Sequence[int]]) -> ChiSquareResult:
    """Pearson chi-square test of independence for a 2x2 table.

    No continuity correction. p comes from the df=1 survival function,
    p = erfc(sqrt(x / 2)).
    """
    if len(table) != 2 or any(len(row) != 2 for row in table):
        raise ValueError("expected a 2x2 table")
    if any(c < 0 for row in table for c in row):
        raise ValueError("cell counts must be non-negative")
    a, b = table[0]
    c, d = table[1]
    n = a + b + c + d
    row_sums = (a + b, c + d)
    col_sums = (a + c, b + d)
    if any(s == 0 for s in row_sums + col_sums):
        raise DegenerateMarginError("all row and column sums must be positive")
    stat = 0.0
    for i, row in enumerate(table):
        for j, observed in enumerate(row):
            expected = row_sums[i] * col_sums[j] / n
            stat += (observed - expected) ** 2 / expected
    p = math.erfc(math.sqrt(stat / 2.0))
    return ChiSquareResult(stat, 1, p)


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise LengthMismatchError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least 2 observations")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float((xc * xc).sum()) * float((yc * yc).sum()))
    if denom == 0.0:
        raise ZeroVarianceError("at least one input has zero variance")
    return float((xc * yc).sum() / denom)
