"""Frozen VGG16 feature encoder truncated after relu3_3."""

from __future__ import annotations

import logging

import torch
from torch import nn

from aqualume.errors import EncoderUnavailable

logger = logging.getLogger("aqualume.losses.perceptual")

# features[15] is relu3_3 in torchvision's VGG16 layout
RELU3_3_END = 16
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


class PerceptualEncoder(nn.Module):
    """Maps [0, 1] RGB batches to relu3_3 feature maps; ImageNet normalisation is internal.

    ``pretrained=False`` builds the same topology with random frozen weights, for
    offline runs where downloading ImageNet weights is not possible.
    """

    def __init__(self, pretrained: bool = True) -> None:
        super().__init__()
        try:
            from torchvision.models import VGG16_Weights, vgg16

            weights = VGG16_Weights.IMAGENET1K_V1 if pretrained else None
            backbone = vgg16(weights=weights).features
        except Exception as exc:
            raise EncoderUnavailable(f"cannot build VGG16 perceptual encoder: {exc}") from exc

        self.features = nn.Sequential(*list(backbone.children())[:RELU3_3_END])
        for param in self.features.parameters():
            param.requires_grad_(False)
        self.features.eval()
        self.register_buffer("mean", torch.tensor(IMAGENET_MEAN).view(1, 3, 1, 1))
        self.register_buffer("std", torch.tensor(IMAGENET_STD).view(1, 3, 1, 1))
        logger.info("Perceptual encoder ready", extra={"pretrained": pretrained})

    def train(self, mode: bool = True) -> PerceptualEncoder:
        # frozen: stay in inference mode regardless of the parent module
        super().train(False)
        return self

    def forward(self, img: torch.Tensor) -> torch.Tensor:
        batch = img if img.dim() == 4 else img.unsqueeze(0)
        return self.features((batch - self.mean) / self.std)
