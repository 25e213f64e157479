"""Protein sequence records, FASTA parsing, and label manifests.

The residue alphabet is the fixed 20-letter list whose positions drive the
angle assignment of the image encoder; its order is load-bearing and must
never change.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .errors import FastaError, ManifestError

logger = logging.getLogger(__name__)

# Ordered one-letter amino-acid codes. Index in this tuple defines the walk
# angle (index * 18 degrees), so the order is part of the encoding contract.
RESIDUE_ALPHABET: tuple[str, ...] = (
    "A", "C", "D", "E", "F", "G", "H", "I", "K", "L",
    "M", "N", "P", "Q", "R", "S", "T", "V", "W", "Y",
)

RESIDUE_INDEX: dict[str, int] = {aa: i for i, aa in enumerate(RESIDUE_ALPHABET)}

# Binary labels and the eight structural-protein classes. Every multiclass
# label maps onto the positive binary label.
PVP = "PVP"
NON_PVP = "non-PVP"
BINARY_LABELS: tuple[str, str] = (NON_PVP, PVP)
MULTICLASS_LABELS: tuple[str, ...] = (
    "Baseplate",
    "Portal",
    "Tail Fiber",
    "Major Capsid",
    "Minor Capsid",
    "Major Tail",
    "Minor Tail",
    "Others",
)


class SanitizePolicy(enum.Enum):
    """How to treat residues outside the 20-letter alphabet (X, B, Z, U, O...)."""

    SKIP = "skip"      # drop the residue, count it on the record
    STRICT = "strict"  # reject the record


@dataclass(frozen=True)
class ProteinSequence:
    """A validated protein sequence: every residue is in RESIDUE_ALPHABET."""

    id: str
    residues: str
    skipped: int = 0

    def __post_init__(self):
        if not self.id:
            raise FastaError("sequence record has an empty id")
        if not self.residues:
            raise FastaError(f"record {self.id!r}: empty sequence")
        bad = set(self.residues) - set(RESIDUE_ALPHABET)
        if bad:
            raise FastaError(
                f"record {self.id!r}: residues outside alphabet: {sorted(bad)}"
            )

    def __len__(self) -> int:
        return len(self.residues)


@dataclass(frozen=True)
class ClassLabel:
    """A binary or multiclass label; multiclass labels are all PVP."""

    name: str
    is_pvp: bool = field(init=False)

    def __post_init__(self):
        if self.name == PVP:
            pvp = True
        elif self.name == NON_PVP:
            pvp = False
        elif self.name in MULTICLASS_LABELS:
            pvp = True
        else:
            raise ManifestError(f"unknown label {self.name!r}")
        object.__setattr__(self, "is_pvp", pvp)

    @property
    def binary(self) -> str:
        return PVP if self.is_pvp else NON_PVP


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FastaError(
            f"input is not decodable as UTF-8 text (byte offset {exc.start})"
        ) from exc


def parse_fasta(
    data: bytes, policy: SanitizePolicy = SanitizePolicy.SKIP
) -> list[ProteinSequence]:
    """Parse FASTA bytes into validated sequence records.

    Headers start with '>'; the id is the first whitespace-delimited header
    token. Wrapped sequence lines are concatenated, whitespace stripped and
    letters uppercased. Residues outside the alphabet are dropped (SKIP,
    counted per record) or rejected (STRICT). Records that are empty, or
    empty after sanitization, are errors.
    """
    text = _decode(data)
    records: list[ProteinSequence] = []
    header: str | None = None
    chunks: list[str] = []

    def flush():
        if header is None:
            return
        hid = header.split()[0] if header.split() else ""
        if not hid:
            raise FastaError("FASTA header with empty id")
        raw = "".join(chunks).upper()
        if not raw:
            raise FastaError(f"record {hid!r}: empty record body")
        kept = []
        skipped = 0
        for ch in raw:
            if ch in RESIDUE_INDEX:
                kept.append(ch)
            elif policy is SanitizePolicy.STRICT:
                raise FastaError(f"record {hid!r}: non-alphabet residue {ch!r}")
            else:
                skipped += 1
        if not kept:
            raise FastaError(f"record {hid!r}: empty after sanitization")
        if skipped:
            logger.warning("record %r: skipped %d non-alphabet residues", hid, skipped)
        records.append(ProteinSequence(hid, "".join(kept), skipped=skipped))

    for line in text.splitlines():
        if line.startswith(">"):
            flush()
            header = line[1:]
            chunks = []
        elif line.strip():
            if header is None:
                raise FastaError("sequence data before first FASTA header")
            chunks.append("".join(line.split()))
    flush()
    return records


def format_fasta(records: list[ProteinSequence], width: int = 60) -> str:
    """Serialize records back to FASTA text (inverse of parse_fasta)."""
    out = []
    for rec in records:
        out.append(f">{rec.id}")
        for i in range(0, len(rec.residues), width):
            out.append(rec.residues[i : i + width])
    return "\n".join(out) + "\n"


def load_manifest(data: bytes) -> dict[str, ClassLabel]:
    """Load a tab-separated ``id<TAB>label`` manifest.

    '#'-prefixed lines are comments. Duplicate ids with the same label are
    tolerated; conflicting labels are an error, as are unknown label names.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ManifestError(
            f"manifest is not decodable as UTF-8 text (byte offset {exc.start})"
        ) from exc
    labels: dict[str, ClassLabel] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ManifestError(f"manifest line {lineno}: expected 'id<TAB>label'")
        rid, name = parts
        label = ClassLabel(name)
        prior = labels.get(rid)
        if prior is not None and prior.name != label.name:
            raise ManifestError(
                f"manifest line {lineno}: id {rid!r} relabeled "
                f"{prior.name!r} -> {label.name!r}"
            )
        labels[rid] = label
    return labels
