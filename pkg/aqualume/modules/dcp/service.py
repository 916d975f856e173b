"""Dark-channel map and darkest-pixel mask used to anchor the backscatter estimate."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TypeAlias

import torch

from aqualume.errors import ContractViolation
from aqualume.modules.imaging import ImageGray, ImageRGB

# (..., 1, H, W) with values in {0, 1}
BinaryMask: TypeAlias = torch.Tensor

DEFAULT_FRACTION = 0.01
DEFAULT_CAP = 10_000


def dcp_map(img: ImageRGB) -> ImageGray:
    """Per-pixel minimum over the three channels (window size 1)."""
    if img.dim() < 3 or img.shape[-3] != 3:
        raise ContractViolation(f"expected (..., 3, H, W), got {tuple(img.shape)}")
    return img.amin(dim=-3, keepdim=True)


def mask_size(
    height: int, width: int, fraction: float = DEFAULT_FRACTION, cap: int = DEFAULT_CAP
) -> int:
    """k = min(ceil(fraction * H * W), cap), with the fraction read as a decimal."""
    if not 0.0 < fraction <= 1.0:
        raise ContractViolation(f"fraction must be in (0, 1], got {fraction}")
    if cap < 1:
        raise ContractViolation(f"cap must be positive, got {cap}")
    exact = Fraction(fraction).limit_denominator(10**9) * (height * width)
    return min(math.ceil(exact), cap)


@torch.no_grad()
def darkest_mask(
    dcp: ImageGray, fraction: float = DEFAULT_FRACTION, cap: int = DEFAULT_CAP
) -> BinaryMask:
    """Select exactly k darkest pixels per image; ties go to the lower row-major index.

    The mask never carries gradient.
    """
    if dcp.dim() < 3 or dcp.shape[-3] != 1:
        raise ContractViolation(f"expected (..., 1, H, W), got {tuple(dcp.shape)}")
    height, width = dcp.shape[-2:]
    k = mask_size(height, width, fraction, cap)

    lead = dcp.shape[:-3]
    flat = dcp.detach().reshape(-1, height * width)
    order = torch.sort(flat, dim=1, stable=True).indices[:, :k]
    mask = torch.zeros_like(flat)
    mask.scatter_(1, order, 1.0)
    return mask.reshape(*lead, 1, height, width)


def masked_overlay(img: ImageRGB, mask: BinaryMask) -> ImageRGB:
    """RGB values kept on selected pixels, black elsewhere."""
    return img * mask
