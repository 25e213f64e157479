#!/usr/bin/env python3
"""Walk-encode a few protein sequences and look at the geometry.

Each residue owns a vertex of an icosagon (angle = alphabet index * 18
degrees) and a fixed color. The pen starts at the image center, moves by a
fixed radius at the residue's angle, and stamps a colored disk; when a
displacement pushes it off the raster, the next loop-top check re-centers
it. The trace below shows exactly that happening for a run of alanines.
"""

import os

import numpy as np

from proteoknight import (
    DEFAULT_TABLE,
    EncodingConfig,
    ProteinSequence,
    displacement,
    encode,
    walk,
)
from proteoknight import png

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

print("angles:", {aa: DEFAULT_TABLE.angle_degrees(aa) for aa in "ACG"})
print("displacement of A at r=15:", displacement("A", r=15))
print("displacement of G at r=15:", displacement("G", r=15))

# A single residue: one red disk, 15 px right of center.
img = encode(ProteinSequence("one", "A"), EncodingConfig(size=512))
png.write_rgb(os.path.join(OUT, "single_a.png"), img.pixels)
lit = np.transpose(np.nonzero(img.pixels.any(axis=2)))
print("single 'A': disk around (x=271, y=256), pixels lit:", len(lit))

# A run of alanines marches off the right edge, skips the off-raster
# stamp, and restarts from the center on the next iteration.
steps = walk(ProteinSequence("march", "A" * 19), EncodingConfig(size=512))
for step in steps[15:]:
    print(
        f"  residue {step.index:2d}: x={step.x:6.1f}  "
        f"center={step.center}  reset_x={step.reset_x}"
    )

# Something more protein-like: mixed residues fold the walk back on itself.
rng = np.random.default_rng(0)
residues = "".join(
    "ACDEFGHIKLMNPQRSTVWY"[i] for i in rng.integers(0, 20, size=400)
)
img = encode(ProteinSequence("mixed", residues), EncodingConfig(size=512))
png.write_rgb(os.path.join(OUT, "mixed_400.png"), img.pixels)
colors = {tuple(px) for px in img.pixels.reshape(-1, 3)} - {(0, 0, 0)}
print(f"mixed 400-residue walk uses {len(colors)} distinct colors -> {OUT}/mixed_400.png")
