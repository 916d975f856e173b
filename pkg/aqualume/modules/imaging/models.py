"""Image containers.

Images are plain ``torch.Tensor`` objects in channels-first layout, optionally
with leading batch dimensions. The aliases below document intent at call sites.
"""

from __future__ import annotations

from typing import NamedTuple, TypeAlias

import torch

# (..., 3, H, W), values in [0, 1], channel order R, G, B
ImageRGB: TypeAlias = torch.Tensor

# (..., 1, H, W), values in [0, 1]
ImageGray: TypeAlias = torch.Tensor


class ImageLab(NamedTuple):
    """CIELab planes, each shaped (..., 1, H, W)."""

    L: torch.Tensor
    a: torch.Tensor
    b: torch.Tensor

    def stack(self) -> torch.Tensor:
        return torch.cat([self.L, self.a, self.b], dim=-3)
