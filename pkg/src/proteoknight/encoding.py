"""Polar-walk image encoding of protein sequences.

Each residue is a vertex of an icosagon: residue index i sits at angle
i * 18 degrees and owns a fixed RGB color. Encoding walks a pen across an
M x M raster; every residue displaces the pen by a fixed radius at its
angle and stamps a filled disk in its color. A loop-top guard re-centers
the pen whenever a displacement pushed it outside [0, M] on either axis.

The walk itself stays in double precision; rasterization rounds stamp
centers half-away-from-zero. A stamp whose center falls outside the raster
is skipped entirely (the next loop-top guard re-centers the pen); a stamp
whose center is in-bounds but whose disk crosses the edge is clipped.
Later stamps overwrite earlier pixels.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import png
from .errors import EncodingError
from .sequences import RESIDUE_ALPHABET, RESIDUE_INDEX, ProteinSequence

logger = logging.getLogger(__name__)

# Residue -> RGB, one color per icosagon vertex.
DEFAULT_COLORS: dict[str, tuple[int, int, int]] = {
    "A": (255, 0, 0),     "C": (255, 255, 0),
    "D": (0, 234, 255),   "E": (170, 0, 255),
    "F": (255, 127, 0),   "G": (191, 255, 0),
    "H": (0, 149, 255),   "I": (255, 0, 170),
    "K": (237, 185, 185), "L": (185, 215, 237),
    "M": (231, 233, 185), "N": (220, 185, 237),
    "P": (185, 237, 224), "Q": (143, 35, 35),
    "R": (35, 98, 143),   "S": (143, 106, 35),
    "T": (107, 35, 143),  "V": (115, 237, 155),
    "W": (204, 204, 204), "Y": (0, 64, 255),
}


class AngleColorTable:
    """Per-residue walk angles (index * 18 degrees) and stamp colors."""

    def __init__(self, colors: dict[str, tuple[int, int, int]] | None = None):
        colors = dict(DEFAULT_COLORS if colors is None else colors)
        missing = set(RESIDUE_ALPHABET) - set(colors)
        if missing:
            raise EncodingError(f"color table missing residues: {sorted(missing)}")
        self.degrees = np.array([18.0 * i for i in range(20)])
        self.radians = np.radians(self.degrees)
        self.colors = np.array([colors[aa] for aa in RESIDUE_ALPHABET], dtype=np.uint8)
        self._cos = np.cos(self.radians)
        self._sin = np.sin(self.radians)

    def angle_degrees(self, residue: str) -> float:
        return float(self.degrees[self._index(residue)])

    def angle_radians(self, residue: str) -> float:
        return float(self.radians[self._index(residue)])

    def color(self, residue: str) -> tuple[int, int, int]:
        return tuple(int(v) for v in self.colors[self._index(residue)])

    def _index(self, residue: str) -> int:
        try:
            return RESIDUE_INDEX[residue]
        except KeyError:
            raise EncodingError(f"unknown residue {residue!r}") from None


DEFAULT_TABLE = AngleColorTable()


@dataclass(frozen=True)
class EncodingConfig:
    """Raster geometry: image side M, walk radius and stamp disk radius."""

    size: int = 512
    radius: float = 15.0
    point_size: int = 2
    background: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        if self.radius <= 0:
            raise EncodingError("walk radius must be positive")
        if self.point_size < 1:
            raise EncodingError("point_size must be >= 1")
        if self.size < 2 * self.radius + 2 * self.point_size:
            raise EncodingError(
                f"image side {self.size} too small for radius {self.radius} "
                f"and point size {self.point_size}"
            )


@dataclass(frozen=True)
class WalkStep:
    """One walk iteration: unrounded pen position and the stamp it produced.

    ``center`` is None when the rounded center fell off the raster and the
    stamp was skipped. ``reset_x``/``reset_y`` record whether the loop-top
    guard re-centered that axis before this residue's displacement.
    """

    index: int
    residue: str
    x: float
    y: float
    reset_x: bool
    reset_y: bool
    center: tuple[int, int] | None


@dataclass(frozen=True)
class EncodedImage:
    """M x M 8-bit RGB raster: pixels[row, col] with row = y, col = x."""

    pixels: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def displacement(
    residue: str, table: AngleColorTable = DEFAULT_TABLE, r: float = 15.0
) -> tuple[float, float]:
    """Displacement (x', y') = (r cos(theta), r sin(theta)) for one residue."""
    theta = table.angle_radians(residue)
    return r * math.cos(theta), r * math.sin(theta)


def _round_half_away(v: float) -> int:
    # round() is banker's rounding; stamp centers round half away from zero
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def walk(
    seq: ProteinSequence,
    cfg: EncodingConfig = EncodingConfig(),
    table: AngleColorTable = DEFAULT_TABLE,
) -> list[WalkStep]:
    """Trace the pen across the raster, one step per residue.

    The walk starts at (M/2, M/2). Per residue, in order: the loop-top
    guard resets any axis outside [0, M] back to M/2; the pen moves by
    (+r cos(theta), -r sin(theta)) (y grows downward on the raster, so a
    positive sine moves the pen up-screen); the stamp center is the
    half-away-from-zero rounding of the new position, or None when that
    center is outside [0, M) on either axis.
    """
    m = float(cfg.size)
    half = m / 2.0
    r = float(cfg.radius)
    dx = r * table._cos
    dy = r * table._sin
    x = half
    y = half
    steps: list[WalkStep] = []
    for i, ch in enumerate(seq.residues):
        reset_x = x < 0.0 or x > m
        if reset_x:
            x = half
        reset_y = y < 0.0 or y > m
        if reset_y:
            y = half
        k = RESIDUE_INDEX[ch]
        x += dx[k]
        y -= dy[k]
        cx = _round_half_away(x)
        cy = _round_half_away(y)
        center = (cx, cy) if 0 <= cx < cfg.size and 0 <= cy < cfg.size else None
        steps.append(WalkStep(i, ch, x, y, reset_x, reset_y, center))
    return steps


def _disk_offsets(point_size: int) -> tuple[np.ndarray, np.ndarray]:
    span = np.arange(-point_size, point_size + 1)
    ox, oy = np.meshgrid(span, span)
    keep = ox * ox + oy * oy <= point_size * point_size
    return ox[keep].ravel(), oy[keep].ravel()


def encode(
    seq: ProteinSequence,
    cfg: EncodingConfig = EncodingConfig(),
    table: AngleColorTable = DEFAULT_TABLE,
) -> EncodedImage:
    """Render one sequence to an M x M RGB image (deterministic)."""
    m = cfg.size
    img = np.empty((m, m, 3), dtype=np.uint8)
    img[:, :] = np.array(cfg.background, dtype=np.uint8)
    offs_x, offs_y = _disk_offsets(cfg.point_size)
    interior = cfg.point_size  # centers at least this far from the edge need no clip
    for step in walk(seq, cfg, table):
        if step.center is None:
            continue
        cx, cy = step.center
        color = table.colors[RESIDUE_INDEX[step.residue]]
        xs = cx + offs_x
        ys = cy + offs_y
        if interior <= cx < m - interior and interior <= cy < m - interior:
            img[ys, xs] = color
        else:
            keep = (xs >= 0) & (xs < m) & (ys >= 0) & (ys < m)
            img[ys[keep], xs[keep]] = color
    return EncodedImage(img)


def _encode_job(args) -> tuple[str, str, str | None]:
    """Worker: encode one sequence and write its PNG. Returns (id, path, error)."""
    rid, residues, cfg, table, out_dir = args
    filename = f"{rid}.png"
    try:
        if os.sep in rid or (os.altsep and os.altsep in rid):
            raise EncodingError(f"id {rid!r} is not usable as a file name")
        image = encode(ProteinSequence(rid, residues), cfg, table)
        png.write_rgb(os.path.join(out_dir, filename), image.pixels)
        return rid, filename, None
    except Exception as exc:  # reported per file; batch policy decides
        return rid, filename, str(exc)


def encode_corpus(
    seqs: list[ProteinSequence],
    cfg: EncodingConfig,
    out_dir,
    labels: dict[str, str] | None = None,
    jobs: int = 1,
    strict: bool = False,
    table: AngleColorTable = DEFAULT_TABLE,
) -> list[tuple[str, str, str]]:
    """Encode a corpus to ``<id>.png`` files plus an ``index.tsv``.

    The index has one ``id<TAB>path<TAB>label`` row per sequence, paths
    relative to ``out_dir``, rows in input order. Output bytes do not
    depend on ``jobs``. Sequences missing from ``labels`` get the label
    "unknown" with a warning (or fail the batch in strict mode). Per-file
    failures are logged and skipped unless strict.
    """
    os.makedirs(out_dir, exist_ok=True)
    labels = labels or {}
    work = [(s.id, s.residues, cfg, table, str(out_dir)) for s in seqs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_encode_job, work, chunksize=32))
    else:
        results = [_encode_job(w) for w in work]

    rows: list[tuple[str, str, str]] = []
    failures = 0
    for rid, filename, err in results:
        if err is not None:
            failures += 1
            logger.error("encoding %r failed: %s", rid, err)
            if strict:
                raise EncodingError(f"encoding {rid!r} failed: {err}")
            continue
        label = labels.get(rid)
        if label is None:
            if strict:
                raise EncodingError(f"no label for id {rid!r}")
            logger.warning("no label for id %r; using 'unknown'", rid)
            label = "unknown"
        rows.append((rid, filename, label))

    index_path = os.path.join(str(out_dir), "index.tsv")
    with open(index_path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")
    if failures:
        logger.warning("%d of %d sequences failed to encode", failures, len(seqs))
    return rows
