"""Fine-tune the configured CNN on an encoded corpus and evaluate it."""

from __future__ import annotations

import logging
import os

import torch
from torch import nn
from torch.utils.data import DataLoader

from .config import HarnessConfig
from .data import EncodedImages
from .metrics import ratios, write_metrics_csv
from .model import build_model, save_checkpoint

logger = logging.getLogger(__name__)


def _make_optimizer(model: nn.Module, cfg: HarnessConfig):
    if cfg.optimizer == "sgd":
        return torch.optim.SGD(model.parameters(), lr=cfg.learning_rate)
    return torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)


def evaluate(model: nn.Module, loader: DataLoader, task: str, device: str):
    """Confusion counts (binary, threshold 0.5 on P(PVP)) or argmax accuracy."""
    model.eval()
    tp = tn = fp = fn = correct = total = 0
    with torch.no_grad():
        for x, y in loader:
            probs = model(x.to(device)).double().softmax(dim=-1)
            if task == "binary":
                pred = probs[:, 1] > 0.5
                actual = y.to(device) == 1
                tp += int((pred & actual).sum())
                tn += int((~pred & ~actual).sum())
                fp += int((pred & ~actual).sum())
                fn += int((~pred & actual).sum())
            else:
                pred = probs.argmax(dim=-1)
                correct += int((pred == y.to(device)).sum())
            total += int(y.shape[0])
    if task == "binary":
        return (tp, tn, fp, fn), ratios(tp, tn, fp, fn), total
    acc = correct / total if total else None
    scores = {"accuracy": acc, "precision": None, "recall": None,
              "specificity": None, "f1": None}
    return (0, 0, 0, 0), scores, total


def finetune(train_tsv, test_tsv, cfg: HarnessConfig, out_dir):
    """Train on the train manifest, evaluate on the test manifest.

    Writes ``checkpoint.pt`` and ``metrics.csv`` into ``out_dir`` and
    returns (checkpoint_path, metrics_path, scores).
    """
    torch.manual_seed(cfg.seed)
    os.makedirs(out_dir, exist_ok=True)
    device = cfg.device

    train_set = EncodedImages(train_tsv, cfg.input_size, cfg.task)
    test_set = EncodedImages(test_tsv, cfg.input_size, cfg.task)
    if not len(train_set):
        raise ValueError(f"{train_tsv}: empty training manifest")
    train_loader = DataLoader(train_set, batch_size=cfg.batch_size, shuffle=True,
                              generator=torch.Generator().manual_seed(cfg.seed))
    test_loader = DataLoader(test_set, batch_size=cfg.batch_size)

    model = build_model(cfg).to(device)
    optimizer = _make_optimizer(model, cfg)
    loss_fn = nn.CrossEntropyLoss()

    for epoch in range(cfg.epochs):
        model.train()
        running = 0.0
        for x, y in train_loader:
            optimizer.zero_grad()
            loss = loss_fn(model(x.to(device)), y.to(device))
            if not torch.isfinite(loss):
                raise RuntimeError(f"training diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            running += float(loss.detach()) * x.shape[0]
        logger.info("epoch %d/%d: train loss %.4f",
                    epoch + 1, cfg.epochs, running / len(train_set))

    counts, scores, total = evaluate(model, test_loader, cfg.task, device)
    ckpt_path = os.path.join(out_dir, "checkpoint.pt")
    metrics_path = os.path.join(out_dir, "metrics.csv")
    save_checkpoint(ckpt_path, model, cfg)
    write_metrics_csv(metrics_path, cfg.task, total, counts, scores)
    return ckpt_path, metrics_path, scores
