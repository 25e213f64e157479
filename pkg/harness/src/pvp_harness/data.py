"""Datasets over the encoder pipeline's TSV files.

Index and split manifests are ``id<TAB>path<TAB>label`` rows with image
paths relative to the TSV's directory; the categories file is
``id<TAB>category``. Binary class order is (non-PVP, PVP) so the positive
class is index 1, matching the analyzer's convention.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import torch
from PIL import Image
from torch.utils.data import Dataset
from torchvision import transforms

BINARY_CLASSES = ("non-PVP", "PVP")
MULTICLASS_CLASSES = (
    "Baseplate",
    "Portal",
    "Tail Fiber",
    "Major Capsid",
    "Minor Capsid",
    "Major Tail",
    "Minor Tail",
    "Others",
)
PVP_LABELS = {"PVP"} | set(MULTICLASS_CLASSES)
CATEGORIES = ("PVP-short", "PVP-long", "nonPVP-short", "nonPVP-long")


class Row(NamedTuple):
    id: str
    path: str
    label: str


def read_rows(tsv_path) -> list[Row]:
    rows = []
    with open(tsv_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{tsv_path}: line {lineno}: expected id<TAB>path<TAB>label")
            rows.append(Row(*parts))
    return rows


def read_categories(tsv_path) -> dict[str, str]:
    out = {}
    with open(tsv_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in CATEGORIES:
                raise ValueError(f"{tsv_path}: line {lineno}: expected id<TAB>category")
            out[parts[0]] = parts[1]
    return out


def label_index(label: str, task: str) -> int:
    if task == "binary":
        return 1 if label in PVP_LABELS else 0
    if label not in MULTICLASS_CLASSES:
        raise ValueError(f"label {label!r} is not a multiclass label")
    return MULTICLASS_CLASSES.index(label)


def make_transform(input_size: int):
    return transforms.Compose(
        [transforms.Resize((input_size, input_size)), transforms.ToTensor()]
    )


class EncodedImages(Dataset):
    """Images + integer labels for one split manifest."""

    def __init__(self, tsv_path, input_size: int, task: str = "binary"):
        self.base_dir = os.path.dirname(os.path.abspath(tsv_path))
        self.rows = read_rows(tsv_path)
        self.task = task
        self.transform = make_transform(input_size)

    def __len__(self) -> int:
        return len(self.rows)

    def load_image(self, row: Row) -> torch.Tensor:
        with Image.open(os.path.join(self.base_dir, row.path)) as img:
            return self.transform(img.convert("RGB"))

    def __getitem__(self, i: int):
        row = self.rows[i]
        return self.load_image(row), label_index(row.label, self.task)
