"""Multi-scale patch discriminators."""

from __future__ import annotations

import torch
from torch import nn


class PatchDiscriminator(nn.Module):
    """Three stride-2 Conv-BatchNorm-ReLU blocks and a 1-channel 3x3 head.

    A 256x256 input yields a 32x32 map of patch scores.
    """

    def __init__(self, ndf: int = 64, blocks: int = 3) -> None:
        super().__init__()
        layers: list[nn.Module] = []
        channels, width = 3, ndf
        for _ in range(blocks):
            layers += [
                nn.Conv2d(channels, width, 4, stride=2, padding=1),
                nn.BatchNorm2d(width),
                nn.ReLU(inplace=True),
            ]
            channels, width = width, width * 2
        layers.append(nn.Conv2d(channels, 1, 3, stride=1, padding=1))
        self.model = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)


class MultiScaleDiscriminator(nn.Module):
    """One patch discriminator per scale; scale k sees the input average-pooled k times."""

    def __init__(self, ndf: int = 64, scales: int = 2) -> None:
        super().__init__()
        self.branches = nn.ModuleList(PatchDiscriminator(ndf) for _ in range(scales))
        self.downsample = nn.AvgPool2d(kernel_size=2)

    def forward(self, img: torch.Tensor) -> list[torch.Tensor]:
        scores = []
        x = img
        for index, branch in enumerate(self.branches):
            if index:
                x = self.downsample(x)
            scores.append(branch(x))
        return scores


def discriminate(D: MultiScaleDiscriminator, img: torch.Tensor) -> list[torch.Tensor]:
    """Patch-score maps, one per scale (full resolution first)."""
    batched = img if img.dim() == 4 else img.unsqueeze(0)
    return D(batched)
