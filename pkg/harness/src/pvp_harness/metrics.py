"""Evaluation ratios from confusion counts (binary) or accuracy (multiclass).

Same formulas as the analyzer package computes; the parity test holds the
two implementations to 1e-9 on shared counts. Undefined ratios (zero
denominators) are None, written as empty CSV cells.
"""

from __future__ import annotations


def ratios(tp: int, tn: int, fp: int, fn: int) -> dict[str, float | None]:
    total = tp + tn + fp + fn
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return {
        "accuracy": (tp + tn) / total if total else None,
        "precision": precision,
        "recall": recall,
        "specificity": tn / (tn + fp) if tn + fp else None,
        "f1": f1,
    }


def write_metrics_csv(path, task: str, n: int, counts, scores) -> None:
    tp, tn, fp, fn = counts
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("task,n,tp,tn,fp,fn,accuracy,precision,recall,specificity,f1\n")
        cells = [task, n, tp, tn, fp, fn] + [
            "" if scores[k] is None else repr(scores[k])
            for k in ("accuracy", "precision", "recall", "specificity", "f1")
        ]
        fh.write(",".join(str(c) for c in cells) + "\n")
