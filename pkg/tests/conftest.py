from __future__ import annotations

from pathlib import Path

import pytest
import torch

from aqualume.modules.data import write_sample_set
from aqualume.modules.losses import PerceptualEncoder
from aqualume.modules.trainer import TrainConfig

TINY_SIZE = 64


@pytest.fixture(scope="session")
def sample_dirs(tmp_path_factory) -> tuple[Path, Path]:
    """(underwater_dir, terrestrial_dir) with 8 procedural 64x64 images each."""
    root = tmp_path_factory.mktemp("samples")
    return write_sample_set(root, count=8, seed=0, size=TINY_SIZE)


@pytest.fixture(scope="session")
def perceptual_encoder() -> PerceptualEncoder:
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(123)
        return PerceptualEncoder(pretrained=False)


@pytest.fixture
def tiny_config(sample_dirs) -> TrainConfig:
    underwater, terrestrial = sample_dirs
    return TrainConfig(
        image_size=TINY_SIZE,
        batch_size=2,
        total_epochs=2,
        decay_start_epoch=1,
        ngf=8,
        nef=8,
        ndf=8,
        residual_blocks=1,
        pool_size=4,
        perceptual_pretrained=False,
        sample_every=0,
        underwater_dir=str(underwater),
        terrestrial_dir=str(terrestrial),
        device="cpu",
    )


@pytest.fixture
def textured_image() -> torch.Tensor:
    generator = torch.Generator().manual_seed(7)
    return torch.rand(3, TINY_SIZE, TINY_SIZE, generator=generator, dtype=torch.float64)
