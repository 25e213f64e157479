"""Fine-tuning harness: pre-trained CNNs on walk-encoded protein images,
with dropout-alive MCD inference emitting the analyzer's wire format."""

from .config import SUPPORTED_MODELS, HarnessConfig
from .finetune import evaluate, finetune
from .mcd import mcd_infer
from .metrics import ratios
from .model import activate_mcd, build_model, dropout_modules, load_checkpoint

__version__ = "0.1.0"

__all__ = [
    "HarnessConfig",
    "SUPPORTED_MODELS",
    "activate_mcd",
    "build_model",
    "dropout_modules",
    "evaluate",
    "finetune",
    "load_checkpoint",
    "mcd_infer",
    "ratios",
]
