#!/usr/bin/env python3
"""Length categories and stratified splits on a synthetic corpus.

Sequences are cut four ways: binary label crossed with short/long at a
per-class length threshold. The equilibrium threshold finder picks the
cut that leaves the two halves as close to equal as possible.
"""

import numpy as np

from proteoknight import (
    ClassLabel,
    ProteinSequence,
    SplitConfig,
    categorize,
    find_equilibrium_delta,
    stratified_split,
)
from proteoknight.datasets import IndexRow

rng = np.random.default_rng(1)

# Lengths drawn from two different regimes per class.
pvp_lengths = np.concatenate([rng.integers(80, 400, 300), rng.integers(400, 900, 280)])
non_lengths = np.concatenate([rng.integers(60, 300, 350), rng.integers(300, 700, 330)])

delta_pvp = find_equilibrium_delta(pvp_lengths.tolist())
delta_non = find_equilibrium_delta(non_lengths.tolist())
print(f"equilibrium thresholds: PVP {delta_pvp}, non-PVP {delta_non}")
for name, lengths, delta in (("PVP", pvp_lengths, delta_pvp), ("non-PVP", non_lengths, delta_non)):
    le = int(np.sum(lengths <= delta))
    print(f"  {name}: {le} short (<= {delta}), {len(lengths) - le} long")

cfg = SplitConfig(delta_pvp=delta_pvp, delta_nonpvp=delta_non, test_fraction=0.2, seed=0)

counts = {}
for n in pvp_lengths:
    cat = categorize(ProteinSequence("x", "A" * int(n)), ClassLabel("PVP"), cfg)
    counts[cat] = counts.get(cat, 0) + 1
for n in non_lengths:
    cat = categorize(ProteinSequence("x", "A" * int(n)), ClassLabel("non-PVP"), cfg)
    counts[cat] = counts.get(cat, 0) + 1
print("category counts:", counts)

rows = [
    IndexRow(f"p{i}", f"p{i}.png", "PVP") for i in range(40)
] + [
    IndexRow(f"n{i}", f"n{i}.png", "non-PVP") for i in range(60)
]
train, test = stratified_split(rows, cfg)
print(f"split 100 records -> {len(train)} train / {len(test)} test")
print("test class balance:", {
    lab: sum(1 for r in test if r.label == lab) for lab in ("PVP", "non-PVP")
})
