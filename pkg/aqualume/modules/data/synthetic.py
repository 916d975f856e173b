"""Synthetic underwater renderings with known depth and water-body parameters."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from aqualume.errors import ContractViolation
from aqualume.modules.imaging import load_image, resize_image, rgb_to_gray
from aqualume.modules.physics import DEPTH_MAX, DegradationParams, DepthMap, degrade

from .models import SyntheticSample


@dataclass
class ParamSampler:
    """Uniform sampler for per-channel transmissions and veiling light."""

    rng: np.random.Generator
    t_range: tuple[float, float] = (0.2, 0.99)
    b_inf_range: tuple[float, float] = (0.6, 1.0)

    @classmethod
    def seeded(cls, seed: int) -> ParamSampler:
        return cls(np.random.default_rng(seed))

    def sample(self, dtype: torch.dtype = torch.float64) -> DegradationParams:
        t_d = self.rng.uniform(*self.t_range, size=3)
        t_b = self.rng.uniform(*self.t_range, size=3)
        b_inf = self.rng.uniform(*self.b_inf_range, size=3)
        return DegradationParams.from_triples(tuple(t_d), tuple(t_b), tuple(b_inf), dtype=dtype)


def _size_pair(size: int | tuple[int, int]) -> tuple[int, int]:
    return (size, size) if isinstance(size, int) else (int(size[0]), int(size[1]))


def constant_depth(value: float, size: int | tuple[int, int], dtype=torch.float64) -> DepthMap:
    if not 0.0 <= value <= DEPTH_MAX:
        raise ContractViolation(f"depth {value} outside [0, {DEPTH_MAX}]")
    return torch.full((1, *_size_pair(size)), float(value), dtype=dtype)


def gradient_depth(size: int | tuple[int, int], dtype=torch.float64) -> DepthMap:
    """Far (6 m) at the top row, near (0 m) at the bottom row."""
    height, width = _size_pair(size)
    rows = torch.linspace(DEPTH_MAX, 0.0, height, dtype=dtype)
    return rows.view(1, height, 1).expand(1, height, width).clone()


def depth_from_descriptor(
    descriptor: str | float, size: int | tuple[int, int], dtype=torch.float64
) -> DepthMap:
    """Resolve ``constant:V``, ``gradient`` or ``file:PATH`` into a (1, H, W) depth map.

    ``file:`` accepts ``.npy`` arrays in meters or an 8-bit image whose gray
    level maps linearly to [0, 6] m.
    """
    if isinstance(descriptor, (int, float)):
        return constant_depth(float(descriptor), size, dtype)
    kind, _, arg = descriptor.partition(":")
    if kind == "constant":
        try:
            value = float(arg)
        except ValueError as exc:
            raise ContractViolation(f"bad constant depth {arg!r}") from exc
        return constant_depth(value, size, dtype)
    if kind == "gradient":
        return gradient_depth(size, dtype)
    if kind == "file":
        path = Path(arg)
        if path.suffix.lower() == ".npy":
            array = np.load(path).astype(np.float64)
            depth = torch.from_numpy(array).reshape(1, *array.shape[-2:])
        else:
            depth = rgb_to_gray(load_image(path).double()) * DEPTH_MAX
        depth = resize_image(depth, _size_pair(size)).to(dtype)
        if depth.min() < 0 or depth.max() > DEPTH_MAX:
            raise ContractViolation(f"depth file {path} outside [0, {DEPTH_MAX}] m")
        return depth
    raise ContractViolation(f"unknown depth descriptor {descriptor!r}")


def make_synthetic(
    clean: torch.Tensor,
    depth_source: DepthMap | float | str,
    param_sampler: ParamSampler,
) -> SyntheticSample:
    """Render ``clean`` underwater in float64; ``degraded`` equals ``degrade`` exactly."""
    clean = clean.to(torch.float64)
    if isinstance(depth_source, torch.Tensor):
        depth = depth_source.to(torch.float64)
        descriptor = "tensor"
    else:
        depth = depth_from_descriptor(depth_source, tuple(clean.shape[-2:]))
        descriptor = (
            f"constant:{float(depth_source)}"
            if isinstance(depth_source, (int, float))
            else str(depth_source)
        )
    params = param_sampler.sample(torch.float64)
    degraded = degrade(clean, depth, params).image
    return SyntheticSample(clean, depth, params, degraded, descriptor)
