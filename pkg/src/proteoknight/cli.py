"""Command-line pipeline: encode, split, train, eval, predict, mcd, report.

Stages hand off through files (index TSV, split manifests, checkpoints,
predictions JSONL) so each is independently runnable and testable. Every
stage is a pure function of its inputs, flags and seed, at the byte level.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Flags override config-file values; the PROTEOKNIGHT_SEED environment
variable is the seed fallback when neither is given.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import datasets, network, png, uncertainty
from .encoding import EncodingConfig, encode_corpus
from .errors import DatasetError, PipelineError
from .metrics import confusion, metrics
from .network import Architecture, DropoutClassifier, TrainConfig
from .sequences import (
    MULTICLASS_LABELS,
    ClassLabel,
    ManifestError,
    SanitizePolicy,
    load_manifest,
    parse_fasta,
)

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "PROTEOKNIGHT_SEED"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code on bad flags."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path) -> dict[str, str]:
    """Flat ``key = value`` config file; '#' lines are comments."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise PipelineError(f"{path}: line {lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


class _Options:
    """Flag > config file > (for seed) environment > default."""

    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name: str, default, cast):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return flag
        if name in self.config:
            try:
                return cast(self.config[name])
            except ValueError as exc:
                raise PipelineError(f"config key {name!r}: {exc}") from exc
        return default

    def seed(self, default: int = 0) -> int:
        flag = getattr(self.args, "seed", None)
        if flag is not None:
            return flag
        if "seed" in self.config:
            return int(self.config["seed"])
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise PipelineError(f"{SEED_ENV_VAR} must be an integer") from exc
        return default


def _parse_rates(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise PipelineError(f"bad dropout rate list {text!r}") from exc


def _read_bytes(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise PipelineError(f"cannot read {path}: {exc}") from exc


def _binary_class_index(label: str) -> int:
    return 1 if ClassLabel(label).is_pvp else 0


def _multiclass_index(label: str) -> int:
    if label not in MULTICLASS_LABELS:
        raise ManifestError(f"label {label!r} is not a multiclass label")
    return MULTICLASS_LABELS.index(label)


def _load_images(rows, base_dir, input_size: int) -> np.ndarray:
    inputs = []
    for row in rows:
        pixels = png.read_rgb(os.path.join(base_dir, row.path))
        inputs.append(network.image_to_input(pixels, input_size))
    return np.stack(inputs) if inputs else np.zeros((0, 3, input_size, input_size))


def _load_labeled(rows, base_dir, input_size: int, task: str):
    to_index = _binary_class_index if task == "binary" else _multiclass_index
    y = np.array([to_index(row.label) for row in rows], dtype=np.int64)
    return _load_images(rows, base_dir, input_size), y


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_encode(args) -> int:
    opt = _Options(args)
    policy = SanitizePolicy.STRICT if args.strict else SanitizePolicy.SKIP
    seqs = parse_fasta(_read_bytes(args.fasta), policy)
    labels = None
    if args.manifest:
        manifest = load_manifest(_read_bytes(args.manifest))
        labels = {rid: lab.name for rid, lab in manifest.items()}
    cfg = EncodingConfig(
        size=opt.get("size", 512, int),
        radius=opt.get("radius", 15.0, float),
        point_size=opt.get("point_size", 2, int),
    )
    rows = encode_corpus(
        seqs, cfg, args.out, labels=labels, jobs=args.jobs, strict=args.strict
    )
    print(f"encoded {len(rows)} of {len(seqs)} sequences -> {args.out}/index.tsv")
    return EXIT_OK


def cmd_split(args) -> int:
    opt = _Options(args)
    rows = datasets.read_index(args.index)
    seqs = {s.id: s for s in parse_fasta(_read_bytes(args.fasta))}
    missing = [row.id for row in rows if row.id not in seqs]
    if missing:
        raise DatasetError(f"index ids missing from FASTA: {missing[:5]}...")

    labels: dict[str, ClassLabel] = {}
    for row in rows:
        try:
            labels[row.id] = ClassLabel(row.label)
        except ManifestError:
            logger.warning("id %r has unrecognized label %r; no category", row.id, row.label)

    delta_pvp = opt.get("delta_pvp", None, int)
    delta_nonpvp = opt.get("delta_nonpvp", None, int)
    if args.auto_delta:
        pvp_lengths = [len(seqs[i]) for i, lab in labels.items() if lab.is_pvp]
        non_lengths = [len(seqs[i]) for i, lab in labels.items() if not lab.is_pvp]
        delta_pvp = datasets.find_equilibrium_delta(pvp_lengths)
        delta_nonpvp = datasets.find_equilibrium_delta(non_lengths)
        print(f"equilibrium thresholds: PVP {delta_pvp}, non-PVP {delta_nonpvp}")
    cfg = datasets.SplitConfig(
        delta_pvp=delta_pvp if delta_pvp is not None else 350,
        delta_nonpvp=delta_nonpvp if delta_nonpvp is not None else 275,
        test_fraction=opt.get("test_fraction", 0.2, float),
        seed=opt.seed(),
    )

    train_rows, test_rows = datasets.stratified_split(rows, cfg)
    categories = {
        row.id: datasets.categorize(seqs[row.id], labels[row.id], cfg)
        for row in rows
        if row.id in labels
    }
    os.makedirs(args.out, exist_ok=True)
    datasets.write_index(os.path.join(args.out, "train.tsv"), train_rows)
    datasets.write_index(os.path.join(args.out, "test.tsv"), test_rows)
    datasets.write_categories(os.path.join(args.out, "categories.tsv"), categories)
    print(
        f"split {len(rows)} records: {len(train_rows)} train, {len(test_rows)} test, "
        f"{len(categories)} categorized -> {args.out}"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    opt = _Options(args)
    rows = datasets.read_index(args.train)
    if not rows:
        raise DatasetError(f"{args.train}: no training records")
    task = args.classes
    input_size = opt.get("input_size", 64, int)
    arch = Architecture(
        input_size=input_size,
        conv_filters=tuple(
            int(v) for v in opt.get("conv_filters", "8,16,32", str).split(",")
        ),
        hidden_units=opt.get("hidden", 64, int),
        n_classes=2 if task == "binary" else len(MULTICLASS_LABELS),
        dropout=opt.get("dropout", 0.2, float),
    )
    cfg = TrainConfig(
        epochs=opt.get("epochs", 25, int),
        batch_size=opt.get("batch_size", 32, int),
        learning_rate=opt.get("learning_rate", 0.001, float),
        seed=opt.seed(),
    )
    x, y = _load_labeled(rows, os.path.dirname(os.path.abspath(args.train)), input_size, task)
    model, history = network.train((x, y), cfg, arch)
    model.save(args.out)
    print(
        f"trained on {len(rows)} images for {cfg.epochs} epochs: "
        f"loss {history[0]:.4f} -> {history[-1]:.4f}; saved {args.out}"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    opt = _Options(args)
    model = DropoutClassifier.load(args.model)
    rows = datasets.read_index(args.test)
    if not rows:
        raise DatasetError(f"{args.test}: no evaluation records")
    x, y = _load_labeled(
        rows, os.path.dirname(os.path.abspath(args.test)), model.arch.input_size, "binary"
    )
    counts = confusion(model, x, y, threshold=opt.get("threshold", 0.5, float))
    scores = metrics(counts)
    print(f"confusion: TP={counts.tp} TN={counts.tn} FP={counts.fp} FN={counts.fn}")
    for name in ("accuracy", "precision", "recall", "specificity", "f1"):
        value = scores[name]
        print(f"{name}: {'undefined' if value is None else repr(value)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("tp,tn,fp,fn,accuracy,precision,recall,specificity,f1\n")
            cells = [counts.tp, counts.tn, counts.fp, counts.fn] + [
                "" if scores[k] is None else repr(scores[k])
                for k in ("accuracy", "precision", "recall", "specificity", "f1")
            ]
            fh.write(",".join(str(c) for c in cells) + "\n")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = DropoutClassifier.load(args.model)
    opt = _Options(args)
    seed = opt.seed()
    for path in args.images:
        pixels = png.read_rgb(path)
        image = network.image_to_input(pixels, model.arch.input_size)
        probs = network.predict(
            model,
            image,
            dropout_active=args.dropout_rate is not None,
            seed=seed,
            p=args.dropout_rate,
        )
        print(f"{path}\t" + "\t".join(repr(float(v)) for v in probs))
    return EXIT_OK


def cmd_mcd(args) -> int:
    opt = _Options(args)
    model = DropoutClassifier.load(args.model)
    rows = datasets.read_index(args.index)
    categories = datasets.read_categories(args.categories)
    cfg = uncertainty.McdConfig(
        passes=opt.get("passes", 100, int),
        dropout_rates=_parse_rates(opt.get("rates", "0.1,0.2,0.3", str)),
        samples_per_category=opt.get("samples", 100, int),
        seed=opt.seed(),
    )
    base_dir = os.path.dirname(os.path.abspath(args.index))
    samples: dict[str, list[tuple[str, np.ndarray]]] = {}
    for category in datasets.CATEGORIES:
        picked = datasets.sample_category(
            rows, categories, category, cfg.samples_per_category, cfg.seed
        )
        samples[category] = [
            (row.id, network.image_to_input(
                png.read_rgb(os.path.join(base_dir, row.path)), model.arch.input_size
            ))
            for row in picked
        ]
    report, records = uncertainty.run_category_analysis(model, samples, cfg)
    os.makedirs(args.out, exist_ok=True)
    uncertainty.write_predictions(os.path.join(args.out, "predictions.jsonl"), records)
    uncertainty.write_report_csv(os.path.join(args.out, "report.csv"), report)
    uncertainty.write_extremes_csv(os.path.join(args.out, "extremes.csv"), report)
    print(
        f"mcd: {len(records)} pass records over {len(report)} (category, rate) groups "
        f"-> {args.out}"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    opt = _Options(args)
    records = uncertainty.read_predictions(args.predictions)
    if not records:
        raise PipelineError(f"{args.predictions}: no records")
    report = uncertainty.analyze_records(records)
    os.makedirs(args.out, exist_ok=True)
    uncertainty.write_report_csv(os.path.join(args.out, "report.csv"), report)
    uncertainty.write_extremes_csv(os.path.join(args.out, "extremes.csv"), report)
    names = uncertainty.write_histograms(args.out, records, bins=opt.get("bins", 10, int))
    print(f"report: {len(report)} rows, {len(names)} histograms -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sp) -> None:
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV_VAR})")


def build_parser() -> _Parser:
    parser = _Parser(prog="proteoknight", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="render FASTA sequences to walk images")
    p.add_argument("--fasta", required=True)
    p.add_argument("--manifest", help="id<TAB>label file")
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, help="image side in pixels (default 512)")
    p.add_argument("--radius", type=float, help="walk radius in pixels (default 15)")
    p.add_argument("--point-size", dest="point_size", type=int, help="disk radius (default 2)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--strict", action="store_true", help="fail on any bad record")
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("split", help="stratified train/test split + length categories")
    p.add_argument("--index", required=True)
    p.add_argument("--fasta", required=True, help="source sequences (for lengths)")
    p.add_argument("--out", required=True)
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p.add_argument("--delta-pvp", dest="delta_pvp", type=int)
    p.add_argument("--delta-nonpvp", dest="delta_nonpvp", type=int)
    p.add_argument(
        "--auto-delta",
        action="store_true",
        help="compute per-class equilibrium length thresholds from the data",
    )
    _add_common(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train the built-in dropout classifier")
    p.add_argument("--train", required=True, help="train manifest TSV")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--classes", choices=("binary", "multiclass"), default="binary")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--dropout", type=float, help="training dropout rate (default 0.2)")
    p.add_argument("--input-size", dest="input_size", type=int)
    p.add_argument("--conv-filters", dest="conv_filters", help="e.g. 8,16,32")
    p.add_argument("--hidden", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a binary checkpoint on a test manifest")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", help="optional metrics CSV")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="softmax vector(s) for image file(s)")
    p.add_argument("--model", required=True)
    p.add_argument("images", nargs="+")
    p.add_argument("--dropout-rate", dest="dropout_rate", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("mcd", help="Monte Carlo Dropout run over length categories")
    p.add_argument("--model", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--categories", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--passes", type=int, help="stochastic passes per sample (default 100)")
    p.add_argument("--rates", help="comma list of dropout rates (default 0.1,0.2,0.3)")
    p.add_argument("--samples", type=int, help="samples per category (default 100)")
    _add_common(p)
    p.set_defaults(func=cmd_mcd)

    p = sub.add_parser("report", help="recompute report/extremes/histograms from predictions")
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, help="histogram bins (default 10)")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - internal bug path
        logger.exception("internal error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
