import numpy as np
from PIL import Image

CATEGORY_OF = {
    "PVP": ("PVP-short", "PVP-long"),
    "non-PVP": ("nonPVP-short", "nonPVP-long"),
}


def dot_image(rng, channel, side=64):
    """Sparse colored dots on black; the lit channel separates the classes."""
    img = np.zeros((side, side, 3), dtype=np.uint8)
    for _ in range(40):
        x, y = rng.integers(2, side - 2, size=2)
        img[y - 1 : y + 2, x - 1 : x + 2, channel] = 255
    return img


def build_corpus(root, n_per_class=20, side=64, seed=0):
    """Encoded-corpus directory shape: PNGs + index/train/test/categories TSVs."""
    rng = np.random.default_rng(seed)
    rows = []
    categories = {}
    for label, channel in (("PVP", 0), ("non-PVP", 2)):
        for i in range(n_per_class):
            rid = f"{label}-{i:03d}"
            Image.fromarray(dot_image(rng, channel, side), mode="RGB").save(
                root / f"{rid}.png"
            )
            rows.append(f"{rid}\t{rid}.png\t{label}")
            categories[rid] = CATEGORY_OF[label][i % 2]
    n_test = max(2, n_per_class // 5)
    test = rows[:n_test] + rows[n_per_class : n_per_class + n_test]
    train = [r for r in rows if r not in test]
    (root / "index.tsv").write_text("\n".join(rows) + "\n")
    (root / "train.tsv").write_text("\n".join(train) + "\n")
    (root / "test.tsv").write_text("\n".join(test) + "\n")
    (root / "categories.tsv").write_text(
        "".join(f"{rid}\t{cat}\n" for rid, cat in categories.items())
    )
    return root
