"""Split construction and sequence-length categories.

A corpus is cut into four categories by binary label and an equilibrium
length threshold per class: "short" means length <= threshold, "long"
means length > threshold. Thresholds can be given (defaults 350 for PVP,
275 for non-PVP) or computed from the data so the short and long halves
are as close to equal as possible.

This module also owns the TSV plumbing around the encoder's index file:
train/test split manifests share the index row format, and categories are
stored as ``id<TAB>category`` lines.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DatasetError
from .sequences import ClassLabel, ProteinSequence

logger = logging.getLogger(__name__)

PVP_SHORT = "PVP-short"
PVP_LONG = "PVP-long"
NONPVP_SHORT = "nonPVP-short"
NONPVP_LONG = "nonPVP-long"
CATEGORIES: tuple[str, ...] = (PVP_SHORT, PVP_LONG, NONPVP_SHORT, NONPVP_LONG)


class IndexRow(NamedTuple):
    """One row of the encoder's index TSV (paths relative to the file)."""

    id: str
    path: str
    label: str


@dataclass(frozen=True)
class SplitConfig:
    delta_pvp: int = 350
    delta_nonpvp: int = 275
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.delta_pvp <= 0 or self.delta_nonpvp <= 0:
            raise DatasetError("length thresholds must be positive")
        if not 0.0 < self.test_fraction < 1.0:
            raise DatasetError("test_fraction must be in (0, 1)")


def find_equilibrium_delta(lengths) -> int:
    """Threshold over the observed lengths balancing the <= / > halves.

    Scans every unique length as a candidate and returns the one minimizing
    |#{n <= delta} - #{n > delta}|, preferring the smaller delta on ties.
    """
    arr = np.asarray(sorted(lengths), dtype=np.int64)
    if arr.size == 0:
        raise DatasetError("cannot compute a length threshold of an empty list")
    if np.any(arr <= 0):
        raise DatasetError("lengths must be positive")
    candidates = np.unique(arr)
    n_le = np.searchsorted(arr, candidates, side="right")
    imbalance = np.abs(2 * n_le - arr.size)
    # argmin takes the first (smallest) candidate on ties
    return int(candidates[int(np.argmin(imbalance))])


def categorize(
    seq: ProteinSequence, label: ClassLabel, cfg: SplitConfig = SplitConfig()
) -> str:
    """Four-way category from the binary label and length vs the class threshold."""
    n = len(seq)
    if label.is_pvp:
        return PVP_SHORT if n <= cfg.delta_pvp else PVP_LONG
    return NONPVP_SHORT if n <= cfg.delta_nonpvp else NONPVP_LONG


def stratified_split(
    records: list[IndexRow], cfg: SplitConfig
) -> tuple[list[IndexRow], list[IndexRow]]:
    """Split labeled records into (train, test) preserving class proportions.

    Per class the test set takes round(test_fraction * n) records, so
    proportions hold within one record. Classes with fewer than two records
    cannot be stratified: they go to train with a warning. Deterministic for
    a given seed; train and test are disjoint and cover the input.
    """
    by_class: dict[str, list[int]] = {}
    for i, rec in enumerate(records):
        by_class.setdefault(rec.label, []).append(i)

    rng = np.random.default_rng(cfg.seed)
    test_idx: set[int] = set()
    for lab in sorted(by_class):
        idx = by_class[lab]
        if len(idx) < 2:
            logger.warning("class %r has %d record(s); keeping in train", lab, len(idx))
            continue
        n_test = int(math.floor(cfg.test_fraction * len(idx) + 0.5))
        picked = rng.permutation(len(idx))[:n_test]
        test_idx.update(idx[j] for j in picked)

    train = [records[i] for i in range(len(records)) if i not in test_idx]
    test = [records[i] for i in range(len(records)) if i in test_idx]
    return train, test


def sample_category(
    records, categories: dict[str, str], category: str, k: int, seed: int
) -> list:
    """Sample ``k`` records of one category uniformly without replacement.

    ``categories`` maps record id to category name. The population follows
    the input order, so a fixed seed reproduces the sample exactly.
    """
    pool = [rec for rec in records if categories.get(rec.id) == category]
    if len(pool) < k:
        raise DatasetError(f"category {category!r} has {len(pool)} records; need {k}")
    rng = np.random.default_rng(seed)
    picked = rng.permutation(len(pool))[:k]
    return [pool[int(j)] for j in picked]


# ---------------------------------------------------------------------------
# TSV plumbing shared by the pipeline stages
# ---------------------------------------------------------------------------

def read_index(path) -> list[IndexRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DatasetError(
                    f"{path}: line {lineno}: expected 'id<TAB>path<TAB>label'"
                )
            rows.append(IndexRow(*parts))
    return rows


def write_index(path, rows: list[IndexRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def read_categories(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in CATEGORIES:
                raise DatasetError(
                    f"{path}: line {lineno}: expected 'id<TAB>category'"
                )
            out[parts[0]] = parts[1]
    return out


def write_categories(path, categories: dict[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rid, cat in categories.items():
            fh.write(f"{rid}\t{cat}\n")
