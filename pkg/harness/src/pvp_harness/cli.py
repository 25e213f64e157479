"""pvp-harness: fine-tune a pre-trained CNN on encoded protein images
(``finetune``) and emit MCD predictions for the analyzer (``mcd``)."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import SUPPORTED_MODELS, HarnessConfig
from .finetune import finetune
from .mcd import mcd_infer


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvp-harness", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="train + evaluate; writes checkpoint and metrics CSV")
    p.add_argument("--train", required=True, help="train manifest TSV")
    p.add_argument("--test", required=True, help="test manifest TSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--model", default="googlenet", choices=SUPPORTED_MODELS)
    p.add_argument("--task", default="binary", choices=("binary", "multiclass"))
    p.add_argument("--weights", default="none",
                   help="none | default | path to a state dict")
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=0.001)
    p.add_argument("--input-size", type=int, default=224)
    p.add_argument("--optimizer", default="adam", choices=("adam", "sgd"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device", default="cpu")

    p = sub.add_parser("mcd", help="dropout-alive inference; writes the predictions file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--categories", required=True)
    p.add_argument("--out", required=True, help="predictions JSONL path")
    p.add_argument("--passes", type=int, default=100)
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--dropout-scope", default="head", choices=("head", "all"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            cfg = HarnessConfig(
                model=args.model,
                epochs=args.epochs,
                batch_size=args.batch_size,
                learning_rate=args.learning_rate,
                input_size=args.input_size,
                weights=args.weights,
                optimizer=args.optimizer,
                task=args.task,
                seed=args.seed,
                device=args.device,
            )
            ckpt, metrics_csv, scores = finetune(args.train, args.test, cfg, args.out)
            print(f"checkpoint: {ckpt}")
            print(f"metrics: {metrics_csv}")
            for name, value in scores.items():
                print(f"{name}: {'undefined' if value is None else value}")
        else:
            n = mcd_infer(
                args.checkpoint,
                args.index,
                args.categories,
                args.out,
                passes=args.passes,
                rate=args.rate,
                samples_per_category=args.samples,
                seed=args.seed,
                dropout_scope=args.dropout_scope,
                device=args.device,
            )
            print(f"wrote {n} records -> {args.out}")
        return 0
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
