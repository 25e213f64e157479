"""Monte Carlo Dropout prediction distributions and uncertainty reports.

For every sampled sequence, T stochastic forward passes with dropout alive
produce a distribution of softmax outputs. P is the positive-class (PVP,
index 1) probability of a pass. Per sample we track the population variance
of P and its binary entropy, computed two ways: on the mean probability and
as the mean of per-pass entropies. Category-level rows average per-sample
numbers and name the samples with the highest and lowest variance.

Every per-pass probability vector is dumped to a JSON-lines predictions
file (one record per pass: id, category, dropout_rate, pass_index, probs),
so every report number can be recomputed from the raw dump. The report
writer itself only ever looks at those records, which keeps the two in
lockstep by construction.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from .datasets import CATEGORIES
from .errors import DatasetError, ModelError, PipelineError
from .network import DropoutClassifier

logger = logging.getLogger(__name__)

# Binary class order is (non-PVP, PVP): P is probs[1].
POSITIVE_INDEX = 1

_RECORD_KEYS = ("id", "category", "dropout_rate", "pass_index", "probs")


@dataclass(frozen=True)
class McdConfig:
    passes: int = 100
    dropout_rates: tuple[float, ...] = (0.1, 0.2, 0.3)
    samples_per_category: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.passes < 2:
            raise ModelError("need at least 2 stochastic passes")
        # rate 0 is the degenerate no-dropout control; 1 would drop everything
        if any(not 0.0 <= r < 1.0 for r in self.dropout_rates):
            raise ModelError("dropout rates must be in [0, 1)")
        if self.samples_per_category < 1:
            raise ModelError("samples_per_category must be positive")


@dataclass(frozen=True)
class PredictionDistribution:
    """T softmax vectors for one input under a fixed dropout rate."""

    id: str
    category: str
    dropout_rate: float
    passes: np.ndarray  # (T, C)

    def __post_init__(self):
        if self.passes.ndim != 2 or self.passes.shape[0] < 2:
            raise ModelError("need a (T, C) array with T >= 2")
        sums = self.passes.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-6):
            raise ModelError("softmax rows must sum to 1 within 1e-6")

    @property
    def positive_probs(self) -> np.ndarray:
        return self.passes[:, POSITIVE_INDEX]


def _run_rng(seed: int, rid: str, rate: float) -> np.random.Generator:
    """Independent stream per (seed, id, rate): parallel order cannot matter."""
    key = int.from_bytes(hashlib.blake2b(rid.encode("utf-8"), digest_size=8).digest(), "big")
    return np.random.default_rng(np.random.SeedSequence([seed, key, int(round(rate * 1e6))]))


def mc_predict(
    model: DropoutClassifier,
    image: np.ndarray,
    passes: int = 100,
    p: float = 0.2,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    rid: str = "",
    category: str = "",
) -> PredictionDistribution:
    """T stochastic forward passes with fresh masks; deterministic per seed."""
    if passes < 2:
        raise ModelError("need at least 2 stochastic passes")
    if rng is None:
        rng = np.random.default_rng(seed)
    probs = model.mc_predict_probs(image, passes, p, rng)
    return PredictionDistribution(rid, category, p, probs)


def expectation(dist: PredictionDistribution) -> np.ndarray:
    """Arithmetic mean of the pass softmax vectors."""
    return dist.passes.mean(axis=0)


def variance(dist: PredictionDistribution) -> float:
    """Population variance of the positive-class probability over passes.

    Computed in the two-pass definitional form; identical passes give an
    exact 0.0 (no summation residue).
    """
    return _variance_of(dist.positive_probs)


def _variance_of(p: np.ndarray) -> float:
    if np.all(p == p[0]):
        return 0.0
    m = p.mean()
    return float(np.mean((p - m) ** 2))


def variance_moment_form(dist: PredictionDistribution) -> float:
    """Mean-of-squares minus squared-mean form (the defining identity)."""
    p = dist.positive_probs
    return float(np.mean(p * p) - p.mean() ** 2)


def entropy(p):
    """Binary entropy in bits; the 0 * log(1/0) limit is taken as 0."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("probabilities must lie in [0, 1]")
    out = np.zeros_like(arr)
    inner = (arr > 0.0) & (arr < 1.0)
    q = arr[inner]
    out[inner] = q * np.log2(1.0 / q) + (1.0 - q) * np.log2(1.0 / (1.0 - q))
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def emit_histogram(values, bins: int) -> np.ndarray:
    """Equal-width histogram counts over [0, 1]; 1.0 lands in the last bin."""
    if bins < 2:
        raise ValueError("need at least 2 bins")
    v = np.asarray(values, dtype=np.float64)
    if np.any((v < 0.0) | (v > 1.0)):
        raise ValueError("histogram values must lie in [0, 1]")
    idx = np.minimum((v * bins).astype(np.int64), bins - 1)
    return np.bincount(idx, minlength=bins)


def histogram_edges(bins: int) -> list[tuple[float, float]]:
    return [(i / bins, (i + 1) / bins) for i in range(bins)]


# ---------------------------------------------------------------------------
# Category analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleStats:
    id: str
    mean_p: float
    variance: float
    entropy_of_mean: float
    entropy_mean_of_passes: float


@dataclass(frozen=True)
class CategoryReport:
    """One (category, dropout rate) row plus its variance extremes."""

    category: str
    dropout_rate: float
    mean_p: float
    variance: float
    entropy_mean_of_passes: float
    entropy_of_mean: float
    n: int
    highest: SampleStats
    lowest: SampleStats


def run_category_analysis(
    model: DropoutClassifier,
    samples: dict[str, list[tuple[str, np.ndarray]]],
    cfg: McdConfig,
) -> tuple[list[CategoryReport], list[dict]]:
    """MCD over sampled images per category and dropout rate.

    ``samples`` maps category name to at least ``samples_per_category``
    (id, image) pairs; the first k are used. Returns the report rows and
    the raw per-pass records the rows were computed from.
    """
    records: list[dict] = []
    for category in CATEGORIES:
        if category not in samples:
            continue
        pool = samples[category]
        if len(pool) < cfg.samples_per_category:
            raise DatasetError(
                f"category {category!r} has {len(pool)} samples; "
                f"need {cfg.samples_per_category}"
            )
        for rate in cfg.dropout_rates:
            for rid, image in pool[: cfg.samples_per_category]:
                rng = _run_rng(cfg.seed, rid, rate)
                dist = mc_predict(
                    model, image, cfg.passes, rate, rng=rng, rid=rid, category=category
                )
                for t in range(cfg.passes):
                    records.append(
                        {
                            "id": rid,
                            "category": category,
                            "dropout_rate": rate,
                            "pass_index": t,
                            "probs": [float(v) for v in dist.passes[t]],
                        }
                    )
    return analyze_records(records), records


def analyze_records(records: list[dict]) -> list[CategoryReport]:
    """Recompute the category report purely from per-pass records."""
    groups: dict[tuple[str, float], dict[str, list]] = {}
    for rec in records:
        probs = rec["probs"]
        if len(probs) != 2:
            raise PipelineError("uncertainty analysis expects binary softmax records")
        group = groups.setdefault((rec["category"], rec["dropout_rate"]), {})
        group.setdefault(rec["id"], []).append((rec["pass_index"], probs[POSITIVE_INDEX]))

    report = []
    for (category, rate), by_id in groups.items():
        stats = []
        for rid, pairs in by_id.items():
            pairs.sort(key=lambda it: it[0])
            p = np.array([v for _, v in pairs])
            mean_p = float(p.mean())
            stats.append(
                SampleStats(
                    id=rid,
                    mean_p=mean_p,
                    variance=_variance_of(p),
                    entropy_of_mean=float(entropy(mean_p)),
                    entropy_mean_of_passes=float(np.mean(entropy(p))),
                )
            )
        # extremes by variance; ties resolved by smallest id for stability
        max_var = max(s.variance for s in stats)
        min_var = min(s.variance for s in stats)
        highest = min((s for s in stats if s.variance == max_var), key=lambda s: s.id)
        lowest = min((s for s in stats if s.variance == min_var), key=lambda s: s.id)
        report.append(
            CategoryReport(
                category=category,
                dropout_rate=rate,
                mean_p=float(np.mean([s.mean_p for s in stats])),
                variance=float(np.mean([s.variance for s in stats])),
                entropy_mean_of_passes=float(
                    np.mean([s.entropy_mean_of_passes for s in stats])
                ),
                entropy_of_mean=float(np.mean([s.entropy_of_mean for s in stats])),
                n=len(stats),
                highest=highest,
                lowest=lowest,
            )
        )
    return report


# ---------------------------------------------------------------------------
# File formats: predictions JSONL, report/extremes/histogram CSVs
# ---------------------------------------------------------------------------

def write_predictions(path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {key: rec[key] for key in _RECORD_KEYS}, separators=(", ", ": ")
                )
            )
            fh.write("\n")


def read_predictions(path) -> list[dict]:
    """Parse a predictions file, validating the record schema strictly."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PipelineError(f"{path}: line {lineno}: not valid JSON: {exc}") from exc
            if not isinstance(rec, dict) or set(rec) != set(_RECORD_KEYS):
                raise PipelineError(
                    f"{path}: line {lineno}: record keys must be exactly {_RECORD_KEYS}"
                )
            if not isinstance(rec["probs"], list) or not all(
                isinstance(v, (int, float)) for v in rec["probs"]
            ):
                raise PipelineError(f"{path}: line {lineno}: probs must be a number list")
            total = sum(rec["probs"])
            if abs(total - 1.0) > 1e-6:
                logger.warning(
                    "%s: line %d: probs sum to %.9f, not 1", path, lineno, total
                )
            records.append(rec)
    return records


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report_csv(path, report: list[CategoryReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("category,dropout_rate,mean_P,variance,entropy_mean_of_passes,entropy_of_mean,n\n")
        for row in report:
            fh.write(
                ",".join(
                    [
                        row.category,
                        _fmt(row.dropout_rate),
                        _fmt(row.mean_p),
                        _fmt(row.variance),
                        _fmt(row.entropy_mean_of_passes),
                        _fmt(row.entropy_of_mean),
                        str(row.n),
                    ]
                )
                + "\n"
            )


def write_extremes_csv(path, report: list[CategoryReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("category,dropout_rate,extreme,id,variance,entropy_of_mean,entropy_mean_of_passes\n")
        for row in report:
            for tag, s in (("high", row.highest), ("low", row.lowest)):
                fh.write(
                    ",".join(
                        [
                            row.category,
                            _fmt(row.dropout_rate),
                            tag,
                            s.id,
                            _fmt(s.variance),
                            _fmt(s.entropy_of_mean),
                            _fmt(s.entropy_mean_of_passes),
                        ]
                    )
                    + "\n"
                )


def write_histograms(out_dir, records: list[dict], bins: int = 10) -> list[str]:
    """One ``bin_low,bin_high,count`` CSV per (category, dropout rate).

    Counts pool the positive-class probabilities of every pass of every
    sample in the group. Returns the written file names.
    """
    groups: dict[tuple[str, float], list[float]] = {}
    for rec in records:
        groups.setdefault((rec["category"], rec["dropout_rate"]), []).append(
            rec["probs"][POSITIVE_INDEX]
        )
    written = []
    for (category, rate), values in groups.items():
        counts = emit_histogram(values, bins)
        name = f"histogram_{category}_{_fmt(rate)}.csv"
        with open(os.path.join(str(out_dir), name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("bin_low,bin_high,count\n")
            for (lo, hi), count in zip(histogram_edges(bins), counts):
                fh.write(f"{_fmt(lo)},{_fmt(hi)},{int(count)}\n")
        written.append(name)
    return written
