#!/usr/bin/env python3
"""The whole pipeline through the CLI, end to end, in a scratch directory.

encode -> split -> train -> eval -> mcd -> report, exactly as you would
run it from a shell. Every stage is a pure function of (inputs, flags,
seed): re-running this script reproduces each artifact byte for byte.
"""

import os
import tempfile

import numpy as np

from proteoknight.cli import main
from proteoknight.sequences import RESIDUE_ALPHABET, ProteinSequence, format_fasta

root = tempfile.mkdtemp(prefix="pipeline-demo-")
print("working in", root)

# synthetic two-class corpus, disjoint residue pools, all four length
# categories populated against the default thresholds (350 / 275)
rng = np.random.default_rng(42)
pools = {"PVP": RESIDUE_ALPHABET[:10], "non-PVP": RESIDUE_ALPHABET[10:]}
spans = [("PVP", 40, 350), ("PVP", 351, 600), ("non-PVP", 40, 275), ("non-PVP", 276, 600)]
seqs, manifest = [], []
for k, (label, lo, hi) in enumerate(spans):
    pool = pools[label]
    for i in range(30):
        n = int(rng.integers(lo, hi + 1))
        seq = ProteinSequence(f"c{k}s{i:02d}", "".join(pool[j] for j in rng.integers(0, 10, n)))
        seqs.append(seq)
        manifest.append(f"{seq.id}\t{label}")

fasta = os.path.join(root, "seqs.fasta")
labels = os.path.join(root, "labels.tsv")
with open(fasta, "w") as fh:
    fh.write(format_fasta(seqs))
with open(labels, "w") as fh:
    fh.write("\n".join(manifest) + "\n")

enc = os.path.join(root, "enc")
model = os.path.join(root, "model.ckpt")
mcd = os.path.join(root, "mcd")
rep = os.path.join(root, "report")

steps = [
    ["encode", "--fasta", fasta, "--manifest", labels, "--out", enc, "--jobs", "2"],
    ["split", "--index", f"{enc}/index.tsv", "--fasta", fasta, "--out", enc, "--seed", "7"],
    ["train", "--train", f"{enc}/train.tsv", "--out", model,
     "--epochs", "25", "--learning-rate", "0.1", "--seed", "0"],
    ["eval", "--model", model, "--test", f"{enc}/test.tsv"],
    ["mcd", "--model", model, "--index", f"{enc}/index.tsv",
     "--categories", f"{enc}/categories.tsv", "--out", mcd,
     "--passes", "50", "--rates", "0.0,0.2", "--samples", "25", "--seed", "5"],
    ["report", "--predictions", f"{mcd}/predictions.jsonl", "--out", rep, "--bins", "10"],
]
for argv in steps:
    print(f"\n$ proteoknight {' '.join(argv)}")
    code = main(argv)
    assert code == 0, f"stage failed with exit code {code}"

print("\nreport.csv:")
with open(os.path.join(mcd, "report.csv")) as fh:
    print(fh.read())
