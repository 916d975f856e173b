"""Global coefficient encoders (attenuation, backscatter, veiling light)."""

from __future__ import annotations

import torch
from torch import nn

from aqualume.modules.physics.models import VEILING_MAX, VEILING_MIN

# Keeps sigmoid outputs strictly inside (0, 1) in float32.
TRANSMISSION_EPS = 1e-6


class CoefficientEncoder(nn.Module):
    """Stride-2 Conv-BatchNorm-ReLU blocks, global average pooling, linear head to 3 logits."""

    def __init__(self, in_channels: int, nef: int = 32, blocks: int = 4) -> None:
        super().__init__()
        self.in_channels = in_channels
        layers: list[nn.Module] = []
        channels, width = in_channels, nef
        for _ in range(blocks):
            layers += [
                nn.Conv2d(channels, width, 4, stride=2, padding=1, bias=False),
                nn.BatchNorm2d(width),
                nn.ReLU(inplace=True),
            ]
            channels, width = width, min(width * 2, nef * 8)
        self.features = nn.Sequential(*layers)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.head = nn.Linear(channels, 3)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Logits shaped (N, 3, 1, 1)."""
        pooled = self.pool(self.features(x)).flatten(1)
        return self.head(pooled).view(-1, 3, 1, 1)


def transmission_from_logits(logits: torch.Tensor) -> torch.Tensor:
    return torch.sigmoid(logits).clamp(TRANSMISSION_EPS, 1.0 - TRANSMISSION_EPS)


def veiling_from_logits(logits: torch.Tensor) -> torch.Tensor:
    return VEILING_MIN + (VEILING_MAX - VEILING_MIN) * torch.sigmoid(logits)
