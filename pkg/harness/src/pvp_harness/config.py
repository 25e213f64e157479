"""Harness configuration. Defaults mirror the reference fine-tuning setup:
25 epochs, batch 32, learning rate 0.001, 224x224 inputs."""

from __future__ import annotations

from dataclasses import dataclass

SUPPORTED_MODELS = ("googlenet", "mobilenet_v3_small", "efficientnet_v2_s")


@dataclass(frozen=True)
class HarnessConfig:
    model: str = "googlenet"
    epochs: int = 25
    batch_size: int = 32
    learning_rate: float = 0.001
    input_size: int = 224
    dropout_rate: float = 0.2       # rate applied during MCD inference
    dropout_scope: str = "head"     # which dropout layers MCD activates: head | all
    weights: str = "none"           # none | default | path to a state dict
    optimizer: str = "adam"         # adam | sgd
    task: str = "binary"            # binary | multiclass
    seed: int = 0
    device: str = "cpu"

    def __post_init__(self):
        if self.model not in SUPPORTED_MODELS:
            raise ValueError(f"model must be one of {SUPPORTED_MODELS}")
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate < 0:
            raise ValueError("bad training hyperparameters")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.dropout_scope not in ("head", "all"):
            raise ValueError("dropout_scope must be 'head' or 'all'")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")
        if self.task not in ("binary", "multiclass"):
            raise ValueError("task must be 'binary' or 'multiclass'")

    @property
    def n_classes(self) -> int:
        return 2 if self.task == "binary" else 8
