"""Dataset and synthetic-sample containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import torch

from aqualume.errors import ContractViolation
from aqualume.modules.imaging import ImageRGB, list_images
from aqualume.modules.physics import DegradationParams, DepthMap


@dataclass
class UnpairedDataset:
    """Two unaligned image collections: terrestrial (x) and underwater (y)."""

    underwater_paths: list[Path]
    terrestrial_paths: list[Path]
    image_size: int = 256

    def __post_init__(self) -> None:
        self.underwater_paths = [Path(p) for p in self.underwater_paths]
        self.terrestrial_paths = [Path(p) for p in self.terrestrial_paths]
        if not self.underwater_paths or not self.terrestrial_paths:
            raise ContractViolation("both image domains need at least one file")
        if self.image_size < 1:
            raise ContractViolation(f"image_size must be positive, got {self.image_size}")

    @classmethod
    def from_dirs(
        cls, underwater_dir: str | Path, terrestrial_dir: str | Path, image_size: int = 256
    ) -> UnpairedDataset:
        return cls(list_images(underwater_dir), list_images(terrestrial_dir), image_size)

    def batches_per_epoch(self, batch_size: int) -> int:
        """Full batches per epoch; the remainder is dropped."""
        return min(len(self.underwater_paths), len(self.terrestrial_paths)) // batch_size


@dataclass(frozen=True)
class SyntheticSample:
    """A clean image rendered underwater with known depth and parameters."""

    clean: ImageRGB
    depth: DepthMap
    params: DegradationParams
    degraded: ImageRGB
    depth_descriptor: str = field(default="tensor")

    def manifest(self) -> dict[str, float | str]:
        doc: dict[str, float | str] = dict(self.params.to_document())
        doc["depth"] = self.depth_descriptor
        return doc

    def to(self, dtype: torch.dtype) -> SyntheticSample:
        return SyntheticSample(
            self.clean.to(dtype),
            self.depth.to(dtype),
            self.params.to(dtype),
            self.degraded.to(dtype),
            self.depth_descriptor,
        )
