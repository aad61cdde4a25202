"""Binary classification metrics.

Per-class precision/recall/F-measure, macro and micro averages, and
accuracy on a 0-100 scale, all derived from one 2x2 confusion matrix.
Displayed numbers round half-up to two decimals; internal values stay at
full precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from polyfuse import errors

CLASSES = ("positive", "negative")


def round_half_up(value: float, decimals: int = 2) -> float:
    """Round with ties away from zero (0.875 -> 0.88), not banker's style."""
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed [true class][predicted class] over ("positive", "negative")."""

    counts: tuple[tuple[int, int], tuple[int, int]]

    @classmethod
    def from_labels(
        cls, predictions: Sequence[str], truth: Sequence[str]
    ) -> "ConfusionMatrix":
        if len(predictions) != len(truth):
            raise errors.LengthMismatch(
                f"{len(predictions)} predictions vs {len(truth)} truth labels"
            )
        if not truth:
            raise errors.EmptyInput("cannot score an empty label list")
        idx = {c: i for i, c in enumerate(CLASSES)}
        counts = [[0, 0], [0, 0]]
        for p, t in zip(predictions, truth):
            if p not in idx or t not in idx:
                raise ValueError(f"labels must be in {CLASSES}, got ({p!r}, {t!r})")
            counts[idx[t]][idx[p]] += 1
        return cls(counts=tuple(tuple(row) for row in counts))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def precision(self, cls_idx: int) -> float:
        predicted = sum(self.counts[t][cls_idx] for t in range(2))
        return self.counts[cls_idx][cls_idx] / predicted if predicted else 0.0

    def recall(self, cls_idx: int) -> float:
        actual = sum(self.counts[cls_idx])
        return self.counts[cls_idx][cls_idx] / actual if actual else 0.0

    def accuracy(self) -> float:
        correct = self.counts[0][0] + self.counts[1][1]
        return 100.0 * correct / self.total


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f_measure: float

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
        }


@dataclass(frozen=True)
class MetricsEntry:
    """All scores for one evaluated configuration."""

    per_class: dict[str, ClassMetrics]
    macro: ClassMetrics
    micro: ClassMetrics
    accuracy: float  # percent, 0-100
    confusion: ConfusionMatrix

    def as_dict(self) -> dict:
        return {
            "per_class": {c: m.as_dict() for c, m in self.per_class.items()},
            "macro": self.macro.as_dict(),
            "micro": self.micro.as_dict(),
            "accuracy": self.accuracy,
            "confusion": [list(row) for row in self.confusion.counts],
        }


def compute_metrics(predictions: Sequence[str], truth: Sequence[str]) -> MetricsEntry:
    """Score predictions against truth; labels are class-name strings."""
    cm = ConfusionMatrix.from_labels(predictions, truth)

    per_class: dict[str, ClassMetrics] = {}
    for i, name in enumerate(CLASSES):
        p, r = cm.precision(i), cm.recall(i)
        per_class[name] = ClassMetrics(precision=p, recall=r, f_measure=f_measure(p, r))

    macro = ClassMetrics(
        precision=sum(m.precision for m in per_class.values()) / len(CLASSES),
        recall=sum(m.recall for m in per_class.values()) / len(CLASSES),
        f_measure=sum(m.f_measure for m in per_class.values()) / len(CLASSES),
    )
    # In the two-class single-label setting micro P = micro R = accuracy.
    micro_acc = cm.accuracy() / 100.0
    micro = ClassMetrics(precision=micro_acc, recall=micro_acc, f_measure=micro_acc)
    return MetricsEntry(
        per_class=per_class, macro=macro, micro=micro,
        accuracy=cm.accuracy(), confusion=cm,
    )
