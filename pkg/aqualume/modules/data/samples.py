"""Procedural desk-scale sample set.

Terrestrial scenes are random rectangles, discs and sinusoidal texture drawn
with OpenCV. Underwater images are other scenes of the same family rendered
through :func:`aqualume.modules.physics.degrade` with sampled parameters and
a far-at-top gradient depth, so the two domains are never pixel-aligned.
"""

from __future__ import annotations

import logging
from pathlib import Path

import cv2
import numpy as np
import torch

from aqualume.modules.imaging import save_image
from aqualume.utils.documents import dump_document

from .synthetic import ParamSampler, make_synthetic

logger = logging.getLogger("aqualume.data.samples")


def procedural_scene(rng: np.random.Generator, size: int) -> torch.Tensor:
    """One textured (3, size, size) float64 scene in [0, 1]."""
    canvas = np.empty((size, size, 3), dtype=np.uint8)
    canvas[:] = rng.integers(60, 200, size=3, dtype=np.uint8)
    for _ in range(int(rng.integers(4, 10))):
        color = tuple(int(c) for c in rng.integers(0, 256, size=3))
        if rng.random() < 0.5:
            x0, y0 = (int(v) for v in rng.integers(0, size, size=2))
            x1, y1 = (int(v) for v in rng.integers(0, size, size=2))
            cv2.rectangle(canvas, (x0, y0), (x1, y1), color, thickness=-1)
        else:
            center = tuple(int(v) for v in rng.integers(0, size, size=2))
            radius = int(rng.integers(size // 16 + 1, size // 4 + 2))
            cv2.circle(canvas, center, radius, color, thickness=-1)

    yy, xx = np.mgrid[0:size, 0:size] / size
    fx, fy = rng.uniform(2.0, 12.0, size=2)
    texture = 0.08 * np.sin(2.0 * np.pi * (fx * xx + fy * yy) + rng.uniform(0, 2 * np.pi))
    scene = canvas.astype(np.float64) / 255.0 + texture[..., None]
    return torch.from_numpy(np.clip(scene, 0.0, 1.0)).permute(2, 0, 1).contiguous()


def write_sample_set(
    root: str | Path, count: int = 32, seed: int = 0, size: int = 256
) -> tuple[Path, Path]:
    """Write ``count`` images per domain under ``root/terrestrial`` and ``root/underwater``.

    Each underwater PNG gets a YAML manifest under ``root/manifests`` with its
    nine parameters and the depth descriptor. Returns (underwater_dir, terrestrial_dir).
    """
    root = Path(root)
    terrestrial_dir = root / "terrestrial"
    underwater_dir = root / "underwater"
    scene_rng = np.random.default_rng(seed)
    sampler = ParamSampler(np.random.default_rng(seed + 1))

    for index in range(count):
        scene = procedural_scene(scene_rng, size)
        save_image(scene, terrestrial_dir / f"terrestrial_{index:03d}.png")

    for index in range(count):
        sample = make_synthetic(procedural_scene(scene_rng, size), "gradient", sampler)
        name = f"underwater_{index:03d}"
        save_image(sample.degraded, underwater_dir / f"{name}.png")
        dump_document(sample.manifest(), root / "manifests" / f"{name}.yaml")

    logger.info(
        "Sample set written",
        extra={"root": str(root), "count": count, "seed": seed, "size": size},
    )
    return underwater_dir, terrestrial_dir
