"""Scene-depth network: residual encoder-decoder with an affine range map to [0, 6] m."""

from __future__ import annotations

import torch
from torch import nn

from aqualume.errors import ContractViolation
from aqualume.modules.physics import DEPTH_MAX


class ResidualBlock(nn.Module):
    def __init__(self, channels: int) -> None:
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
            nn.InstanceNorm2d(channels),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
            nn.InstanceNorm2d(channels),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.block(x)


def depth_from_raw(u: torch.Tensor) -> torch.Tensor:
    """Map the unbounded network output to meters: clamp(3 + 3u, 0, 6)."""
    half = DEPTH_MAX / 2.0
    return (half + half * u).clamp(0.0, DEPTH_MAX)


class DepthNet(nn.Module):
    """7x7 stem, two stride-2 downsamplings, residual blocks, two upsamplings, 7x7 head.

    The head has neither normalisation nor activation so nothing recentres the
    depth distribution.
    """

    def __init__(self, ngf: int = 64, residual_blocks: int = 6, image_size: int = 256) -> None:
        super().__init__()
        self.image_size = image_size
        layers: list[nn.Module] = [
            nn.ReflectionPad2d(3),
            nn.Conv2d(3, ngf, 7),
            nn.InstanceNorm2d(ngf),
            nn.ReLU(inplace=True),
        ]
        channels = ngf
        for _ in range(2):
            layers += [
                nn.Conv2d(channels, channels * 2, 3, stride=2, padding=1),
                nn.InstanceNorm2d(channels * 2),
                nn.ReLU(inplace=True),
            ]
            channels *= 2
        layers += [ResidualBlock(channels) for _ in range(residual_blocks)]
        for _ in range(2):
            layers += [
                nn.ConvTranspose2d(
                    channels, channels // 2, 3, stride=2, padding=1, output_padding=1
                ),
                nn.InstanceNorm2d(channels // 2),
                nn.ReLU(inplace=True),
            ]
            channels //= 2
        self.trunk = nn.Sequential(*layers)
        self.head = nn.Sequential(nn.ReflectionPad2d(3), nn.Conv2d(channels, 1, 7))

    def forward(self, img: torch.Tensor) -> torch.Tensor:
        if img.dim() != 4 or img.shape[1] != 3 or tuple(img.shape[-2:]) != (
            self.image_size,
            self.image_size,
        ):
            raise ContractViolation(
                f"depth net expects (N, 3, {self.image_size}, {self.image_size}), "
                f"got {tuple(img.shape)}"
            )
        return depth_from_raw(self.head(self.trunk(img)))
