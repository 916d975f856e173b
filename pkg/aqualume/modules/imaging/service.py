"""Color conversions and file I/O shared by every module."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

from aqualume.errors import ContractViolation, ImageReadError
from aqualume.utils.storage import is_image_path

from .models import ImageGray, ImageLab, ImageRGB

logger = logging.getLogger("aqualume.imaging")

# sRGB primaries, D65 white
_RGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
_LUMA = (0.299, 0.587, 0.114)
_DELTA = 6.0 / 29.0


def _channels_last_check(img: torch.Tensor, channels: int) -> None:
    if img.dim() < 3 or img.shape[-3] != channels:
        raise ContractViolation(
            f"expected a (..., {channels}, H, W) tensor, got shape {tuple(img.shape)}"
        )


def _matrices(like: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    m = torch.tensor(_RGB_TO_XYZ, dtype=like.dtype, device=like.device)
    white = m.sum(dim=1)
    return m, white


def _srgb_to_linear(c: torch.Tensor) -> torch.Tensor:
    return torch.where(c <= 0.04045, c / 12.92, ((c.clamp_min(0.04045) + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c: torch.Tensor) -> torch.Tensor:
    high = 1.055 * c.clamp_min(0.0031308) ** (1.0 / 2.4) - 0.055
    return torch.where(c <= 0.0031308, 12.92 * c, high)


def _lab_f(t: torch.Tensor) -> torch.Tensor:
    return torch.where(
        t > _DELTA**3,
        t.clamp_min(_DELTA**3) ** (1.0 / 3.0),
        t / (3 * _DELTA**2) + 4.0 / 29.0,
    )


def _lab_f_inv(f: torch.Tensor) -> torch.Tensor:
    return torch.where(f > _DELTA, f**3, 3 * _DELTA**2 * (f - 4.0 / 29.0))


def rgb_to_lab(img: ImageRGB) -> ImageLab:
    """sRGB -> CIELab (D65).

    XYZ is expressed relative to the reference white as ``g + sum_i w_i (c_i - g)``
    with row-normalised weights, which equals the textbook matrix product but
    gives exactly a = b = 0 for achromatic pixels.
    """
    _channels_last_check(img, 3)
    lin = _srgb_to_linear(img)
    m, white = _matrices(img)
    weights = m / white[:, None]
    green = lin[..., 1:2, :, :]
    offsets = lin - green
    rel = green + torch.einsum("ij,...jhw->...ihw", weights, offsets)
    fx, fy, fz = _lab_f(rel).split(1, dim=-3)
    return ImageLab(L=116.0 * fy - 16.0, a=500.0 * (fx - fy), b=200.0 * (fy - fz))


def lab_to_rgb(lab: ImageLab) -> ImageRGB:
    """CIELab (D65) -> sRGB, the inverse of :func:`rgb_to_lab` (not clamped)."""
    fy = (lab.L + 16.0) / 116.0
    fx = fy + lab.a / 500.0
    fz = fy - lab.b / 200.0
    rel = _lab_f_inv(torch.cat([fx, fy, fz], dim=-3))
    m, white = _matrices(rel)
    xyz = rel * white[:, None, None]
    lin = torch.einsum("ij,...jhw->...ihw", torch.linalg.inv(m), xyz)
    return _linear_to_srgb(lin)


def rgb_to_gray(img: ImageRGB) -> ImageGray:
    """ITU-R BT.601 luma."""
    _channels_last_check(img, 3)
    r, g, b = img.split(1, dim=-3)
    return _LUMA[0] * r + _LUMA[1] * g + _LUMA[2] * b


def resize_image(img: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    """Bilinear resize without antialiasing; accepts (C, H, W) or (N, C, H, W)."""
    if tuple(img.shape[-2:]) == tuple(size):
        return img
    batched = img if img.dim() == 4 else img.unsqueeze(0)
    out = F.interpolate(batched, size=size, mode="bilinear", align_corners=False, antialias=False)
    return out if img.dim() == 4 else out.squeeze(0)


def load_image(path: str | Path, size: int | None = None) -> ImageRGB:
    """Decode an 8-bit raster into a (3, size, size) tensor in [0, 1].

    Grayscale and palette images are converted to RGB. ``size=None`` keeps the
    native resolution.
    """
    try:
        with Image.open(path) as handle:
            array = np.asarray(handle.convert("RGB"), dtype=np.uint8)
    except (OSError, ValueError) as exc:
        raise ImageReadError(str(path), str(exc)) from exc

    img = torch.from_numpy(array.copy()).permute(2, 0, 1).to(torch.float32) / 255.0
    if size is not None:
        img = resize_image(img, (size, size))
    return img.clamp_(0.0, 1.0)


def save_image(img: torch.Tensor, path: str | Path) -> Path:
    """Write a (3, H, W) or (1, H, W) tensor as PNG; clamps then rounds half up."""
    if img.dim() != 3 or img.shape[0] not in (1, 3):
        raise ContractViolation(f"cannot save tensor of shape {tuple(img.shape)} as an image")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    quantised = torch.floor(img.detach().cpu().double().clamp(0.0, 1.0) * 255.0 + 0.5)
    array = quantised.to(torch.uint8).permute(1, 2, 0).numpy()
    if array.shape[2] == 1:
        Image.fromarray(array[:, :, 0]).save(path, format="PNG")
    else:
        Image.fromarray(array).save(path, format="PNG")
    return path


def list_images(directory: str | Path) -> list[Path]:
    """Sorted PNG/JPEG files in ``directory``; other files are skipped with a warning."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageReadError(str(directory), "not a directory")
    images: list[Path] = []
    for entry in sorted(directory.iterdir()):
        if not entry.is_file() or entry.name.startswith("."):
            continue
        if is_image_path(entry):
            images.append(entry)
        else:
            logger.warning("Skipping non-image file", extra={"path": str(entry)})
    return images


def compose_grid(rows: list[list[torch.Tensor]], gap: int = 4, fill: float = 1.0) -> ImageRGB:
    """Tile equally sized (3, H, W) images row by row with ``gap`` pixels between cells."""
    if not rows or not rows[0]:
        raise ContractViolation("grid needs at least one image")
    height, width = rows[0][0].shape[-2:]
    n_rows, n_cols = len(rows), max(len(row) for row in rows)
    canvas = torch.full(
        (3, n_rows * height + (n_rows - 1) * gap, n_cols * width + (n_cols - 1) * gap),
        fill,
        dtype=rows[0][0].dtype,
    )
    for r, row in enumerate(rows):
        for c, cell in enumerate(row):
            if tuple(cell.shape[-2:]) != (height, width):
                raise ContractViolation("grid cells must share one size")
            if cell.shape[-3] == 1:
                cell = cell.expand(3, -1, -1)
            top, left = r * (height + gap), c * (width + gap)
            canvas[:, top : top + height, left : left + width] = cell.detach().cpu()
    return canvas
