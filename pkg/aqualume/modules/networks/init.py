from __future__ import annotations

import torch
from torch import nn


@torch.no_grad()
def init_weights(module: nn.Module, std: float = 0.02, seed: int | None = None) -> nn.Module:
    """Zero-mean Gaussian weights (std 0.02), unit-mean norm scales, zero biases."""

    def _apply(m: nn.Module) -> None:
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            nn.init.normal_(m.weight, 0.0, std)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.BatchNorm2d):
            nn.init.normal_(m.weight, 1.0, std)
            nn.init.zeros_(m.bias)

    if seed is None:
        module.apply(_apply)
    else:
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            module.apply(_apply)
    return module
