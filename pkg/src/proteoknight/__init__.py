"""ProteoKnight: walk-based image encoding of protein sequences, a small
dropout-capable image classifier, and Monte Carlo Dropout uncertainty
reports for phage virion protein classification."""

from .encoding import (
    AngleColorTable,
    EncodedImage,
    EncodingConfig,
    DEFAULT_TABLE,
    displacement,
    encode,
    encode_corpus,
    walk,
)
from .datasets import (
    CATEGORIES,
    SplitConfig,
    categorize,
    find_equilibrium_delta,
    sample_category,
    stratified_split,
)
from .metrics import ConfusionCounts, confusion, confusion_from_scores, metrics
from .network import Architecture, DropoutClassifier, TrainConfig, predict, train
from .sequences import (
    RESIDUE_ALPHABET,
    ClassLabel,
    ProteinSequence,
    SanitizePolicy,
    format_fasta,
    load_manifest,
    parse_fasta,
)
from .uncertainty import (
    McdConfig,
    PredictionDistribution,
    analyze_records,
    emit_histogram,
    entropy,
    expectation,
    mc_predict,
    read_predictions,
    run_category_analysis,
    variance,
    variance_moment_form,
)

__version__ = "0.1.0"

__all__ = [
    "AngleColorTable",
    "Architecture",
    "CATEGORIES",
    "ClassLabel",
    "ConfusionCounts",
    "DEFAULT_TABLE",
    "DropoutClassifier",
    "EncodedImage",
    "EncodingConfig",
    "McdConfig",
    "PredictionDistribution",
    "ProteinSequence",
    "RESIDUE_ALPHABET",
    "SanitizePolicy",
    "SplitConfig",
    "TrainConfig",
    "analyze_records",
    "categorize",
    "confusion",
    "confusion_from_scores",
    "displacement",
    "emit_histogram",
    "encode",
    "encode_corpus",
    "entropy",
    "expectation",
    "find_equilibrium_delta",
    "format_fasta",
    "load_manifest",
    "mc_predict",
    "metrics",
    "parse_fasta",
    "predict",
    "read_predictions",
    "run_category_analysis",
    "sample_category",
    "stratified_split",
    "train",
    "variance",
    "variance_moment_form",
    "walk",
]
