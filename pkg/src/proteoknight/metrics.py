"""Binary confusion counts and the five standard evaluation ratios.

Ratios with a zero denominator come back as None (explicitly undefined)
rather than NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ModelError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion_from_scores(
    positive_probs: np.ndarray, labels: np.ndarray, threshold: float = 0.5
) -> ConfusionCounts:
    """Counts under the decision rule: positive iff P(positive) > threshold."""
    probs = np.asarray(positive_probs, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if probs.shape != y.shape:
        raise ModelError("scores and labels must have the same shape")
    pred = probs > threshold
    actual = y == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & actual)),
        tn=int(np.sum(~pred & ~actual)),
        fp=int(np.sum(pred & ~actual)),
        fn=int(np.sum(~pred & actual)),
    )


def confusion(model, x, y, threshold: float = 0.5) -> ConfusionCounts:
    """Evaluate a binary classifier on a batch: positive class is index 1."""
    if model.arch.n_classes != 2:
        raise ModelError("confusion counts require a binary model")
    probs = model.predict_proba(x)[:, 1]
    return confusion_from_scores(probs, y, threshold)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics(c: ConfusionCounts) -> dict[str, float | None]:
    """Accuracy, precision, recall, specificity and F1 from the counts."""
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return {
        "accuracy": _ratio(c.tp + c.tn, c.total),
        "precision": precision,
        "recall": recall,
        "specificity": _ratio(c.tn, c.tn + c.fp),
        "f1": f1,
    }
