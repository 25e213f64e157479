"""Pre-trained CNN construction and dropout control for MCD inference."""

from __future__ import annotations

import torch
from torch import nn
from torchvision import models

from .config import HarnessConfig


def build_model(cfg: HarnessConfig) -> nn.Module:
    """Instantiate the configured architecture with a C-way head.

    ``weights='none'`` gives random init (the only mode that works without
    network access); ``'default'`` loads the torchvision pre-trained
    weights and swaps the classifier head; any other value is a path to a
    previously saved state dict.
    """
    n = cfg.n_classes
    if cfg.weights == "none":
        if cfg.model == "googlenet":
            return models.googlenet(weights=None, num_classes=n, aux_logits=False,
                                    init_weights=True)
        if cfg.model == "mobilenet_v3_small":
            return models.mobilenet_v3_small(weights=None, num_classes=n)
        return models.efficientnet_v2_s(weights=None, num_classes=n)

    if cfg.weights == "default":
        if cfg.model == "googlenet":
            net = models.googlenet(weights=models.GoogLeNet_Weights.DEFAULT)
            net.aux_logits = False
            net.fc = nn.Linear(net.fc.in_features, n)
        elif cfg.model == "mobilenet_v3_small":
            net = models.mobilenet_v3_small(weights=models.MobileNet_V3_Small_Weights.DEFAULT)
            net.classifier[-1] = nn.Linear(net.classifier[-1].in_features, n)
        else:
            net = models.efficientnet_v2_s(weights=models.EfficientNet_V2_S_Weights.DEFAULT)
            net.classifier[-1] = nn.Linear(net.classifier[-1].in_features, n)
        return net

    # a state dict saved by save_checkpoint
    state = torch.load(cfg.weights, map_location="cpu", weights_only=True)
    net = build_model(
        HarnessConfig(model=cfg.model, task=cfg.task, weights="none",
                      input_size=cfg.input_size)
    )
    net.load_state_dict(state)
    return net


def save_checkpoint(path, model: nn.Module, cfg: HarnessConfig) -> None:
    torch.save(
        {"state_dict": model.state_dict(),
         "model": cfg.model, "task": cfg.task, "input_size": cfg.input_size},
        path,
    )


def load_checkpoint(path) -> tuple[nn.Module, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=True)
    meta = {k: blob[k] for k in ("model", "task", "input_size")}
    cfg = HarnessConfig(model=meta["model"], task=meta["task"],
                        input_size=meta["input_size"])
    net = build_model(cfg)
    net.load_state_dict(blob["state_dict"])
    return net, meta


def dropout_modules(model: nn.Module, scope: str) -> list[nn.Dropout]:
    """The dropout layers MCD keeps alive at inference.

    'head': only the last dropout before the classifier (GoogLeNet's
    ``dropout`` attribute, or the final Dropout found). 'all': every
    Dropout module in the network.
    """
    found = [m for m in model.modules() if isinstance(m, nn.Dropout)]
    if not found:
        raise ValueError("model has no dropout layer to activate")
    return found if scope == "all" else [found[-1]]


def activate_mcd(model: nn.Module, rate: float, scope: str) -> None:
    """Eval mode, but with the selected dropout layers stochastic."""
    model.eval()
    for mod in dropout_modules(model, scope):
        mod.p = rate
        mod.train()
