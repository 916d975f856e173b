"""History of generated images fed to the discriminators."""

from __future__ import annotations

from typing import Any

import numpy as np
import torch


class ImagePool:
    """Keeps up to ``size`` past fakes; each query returns a mix of new and stored images.

    Every incoming image, while the pool is filling, is stored and returned.
    Afterwards it is swapped with a random stored image with probability 0.5.
    ``size=0`` returns the input unchanged.
    """

    def __init__(self, size: int, rng: np.random.Generator) -> None:
        self.size = size
        self.rng = rng
        self.images: list[torch.Tensor] = []

    def query(self, images: torch.Tensor) -> torch.Tensor:
        if self.size == 0:
            return images
        out: list[torch.Tensor] = []
        for image in images.detach():
            image = image.unsqueeze(0)
            if len(self.images) < self.size:
                self.images.append(image.clone())
                out.append(image)
            elif self.rng.random() > 0.5:
                index = int(self.rng.integers(0, self.size))
                out.append(self.images[index].clone())
                self.images[index] = image.clone()
            else:
                out.append(image)
        return torch.cat(out, dim=0)

    def state_dict(self) -> dict[str, Any]:
        return {
            "rng": self.rng.bit_generator.state,
            "images": [img.cpu() for img in self.images],
        }

    def load_state_dict(self, state: dict[str, Any], device: torch.device | str = "cpu") -> None:
        self.rng.bit_generator.state = state["rng"]
        self.images = [img.to(device) for img in state["images"]]
