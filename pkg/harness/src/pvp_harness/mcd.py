"""MCD inference: dropout kept alive at test time, per-pass records emitted
in the analyzer pipeline's predictions wire format.

One JSON line per stochastic pass:
``{"id", "category", "dropout_rate", "pass_index", "probs"}``.
The analyzer's ``report`` command consumes the file unmodified; all
variance/entropy math lives there, not here.
"""

from __future__ import annotations

import json
import os

import numpy as np
import torch

from .data import CATEGORIES, EncodedImages, read_categories
from .model import activate_mcd, load_checkpoint

RECORD_KEYS = ("id", "category", "dropout_rate", "pass_index", "probs")


def mcd_infer(
    checkpoint_path,
    index_tsv,
    categories_tsv,
    out_path,
    passes: int = 100,
    rate: float = 0.2,
    samples_per_category: int = 100,
    seed: int = 0,
    dropout_scope: str = "head",
    device: str = "cpu",
) -> int:
    """Run MCD over sampled category members; returns the record count."""
    if passes < 2:
        raise ValueError("need at least 2 stochastic passes")
    model, meta = load_checkpoint(checkpoint_path)
    model.to(device)
    dataset = EncodedImages(index_tsv, meta["input_size"], meta["task"])
    categories = read_categories(categories_tsv)
    by_category = {c: [] for c in CATEGORIES}
    for row in dataset.rows:
        cat = categories.get(row.id)
        if cat is not None:
            by_category[cat].append(row)

    rng = np.random.default_rng(seed)
    torch.manual_seed(seed)
    activate_mcd(model, rate, dropout_scope)

    written = 0
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for category in CATEGORIES:
            pool = by_category[category]
            if len(pool) < samples_per_category:
                raise ValueError(
                    f"category {category!r} has {len(pool)} rows; "
                    f"need {samples_per_category}"
                )
            picked = [pool[int(j)] for j in rng.permutation(len(pool))[:samples_per_category]]
            for row in picked:
                image = dataset.load_image(row).to(device)
                with torch.no_grad():
                    if rate == 0.0:
                        # degenerate control: one pass, replicated, so the
                        # analyzer sees bit-identical rows (exact zero variance)
                        one = model(image.unsqueeze(0)).double().softmax(dim=-1)
                        probs = one.repeat(passes, 1).cpu().numpy()
                    else:
                        batch = image.unsqueeze(0).repeat(passes, 1, 1, 1)
                        probs = model(batch).double().softmax(dim=-1).cpu().numpy()
                for t in range(passes):
                    record = {
                        "id": row.id,
                        "category": category,
                        "dropout_rate": rate,
                        "pass_index": t,
                        "probs": [float(v) for v in probs[t]],
                    }
                    fh.write(json.dumps(record, separators=(", ", ": ")) + "\n")
                    written += 1
    return written
