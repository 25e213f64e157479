"""Exception hierarchy shared by the pipeline stages.

``PipelineError`` marks recoverable data problems (bad input files, label
conflicts, insufficient samples); anything else escaping a stage is an
internal bug. The CLI maps these onto exit codes.
"""


class PipelineError(Exception):
    """Base class for data-level failures."""


class FastaError(PipelineError):
    """Malformed or undecodable FASTA input."""


class ManifestError(PipelineError):
    """Malformed label manifest or unknown/conflicting labels."""


class EncodingError(PipelineError):
    """Invalid encoding configuration or unknown residue."""


class DatasetError(PipelineError):
    """Split/category construction failure."""


class ModelError(PipelineError):
    """Model shape mismatch, divergence, or checkpoint problems."""
