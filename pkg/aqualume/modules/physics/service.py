"""Differentiable underwater image formation.

    I_c = J_c * t_D_c^z + B_inf_c * (1 - t_B_c^z)

Depth is per pixel; the coefficients are per image and per channel and are
broadcast across pixels.
"""

from __future__ import annotations

from typing import NamedTuple

import torch

from aqualume.errors import ContractViolation

from .models import DegradationParams, DepthMap

DEPTH_MAX = 6.0

# Floor on t_D^z before dividing in restore(), per dtype.
TRANSMISSION_FLOOR = 1e-3
_FLOOR_BY_DTYPE = {torch.float64: 1e-12}


class Rendered(NamedTuple):
    """``image`` is clamped to [0, 1]; ``raw`` keeps the pre-clamp values for losses."""

    image: torch.Tensor
    raw: torch.Tensor


def default_floor(dtype: torch.dtype) -> float:
    return _FLOOR_BY_DTYPE.get(dtype, TRANSMISSION_FLOOR)


def _check_shapes(img: torch.Tensor | None, z: DepthMap, p: DegradationParams) -> None:
    if z.dim() < 3 or z.shape[-3] != 1:
        raise ContractViolation(f"depth must be (..., 1, H, W), got {tuple(z.shape)}")
    if img is None:
        return
    if img.dim() < 3 or img.shape[-3] != 3:
        raise ContractViolation(f"image must be (..., 3, H, W), got {tuple(img.shape)}")
    if img.shape[-2:] != z.shape[-2:]:
        raise ContractViolation(
            f"image {tuple(img.shape[-2:])} and depth {tuple(z.shape[-2:])} sizes differ"
        )
    try:
        torch.broadcast_shapes(img.shape, z.shape, p.t_d.shape)
    except RuntimeError as exc:
        raise ContractViolation(f"batch shapes do not broadcast: {exc}") from exc


def transmission_maps(z: DepthMap, p: DegradationParams) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-pixel attenuation and backscatter transmissions (t_D^z, t_B^z)."""
    _check_shapes(None, z, p)
    return torch.pow(p.t_d, z), torch.pow(p.t_b, z)


def estimate_backscatter(z: DepthMap, p: DegradationParams) -> torch.Tensor:
    """B_inf * (1 - t_B^z); nondecreasing in z and saturating at B_inf."""
    _check_shapes(None, z, p)
    return p.b_inf * (1.0 - torch.pow(p.t_b, z))


def degrade(J: torch.Tensor, z: DepthMap, p: DegradationParams) -> Rendered:
    """Render a terrestrial image J underwater."""
    _check_shapes(J, z, p)
    raw = J * torch.pow(p.t_d, z) + estimate_backscatter(z, p)
    return Rendered(image=raw.clamp(0.0, 1.0), raw=raw)


def restore(
    I: torch.Tensor,  # noqa: E741
    z: DepthMap,
    p: DegradationParams,
    floor: float | None = None,
) -> Rendered:
    """Invert :func:`degrade`: J = (I - B_inf (1 - t_B^z)) / max(t_D^z, floor).

    The result is exact wherever t_D^z >= floor.
    """
    _check_shapes(I, z, p)
    floor = default_floor(I.dtype) if floor is None else floor
    direct = torch.pow(p.t_d, z).clamp_min(floor)
    raw = (I - estimate_backscatter(z, p)) / direct
    return Rendered(image=raw.clamp(0.0, 1.0), raw=raw)
