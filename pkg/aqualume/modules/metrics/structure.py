"""Reference and no-reference structure metrics on grayscale."""

from __future__ import annotations

import cv2
import numpy as np
import torch
from skimage.metrics import structural_similarity

from aqualume.errors import ContractViolation
from aqualume.modules.imaging import ImageRGB, rgb_to_gray

SSIM_SIGMA = 1.5


def gray_array(img: ImageRGB) -> np.ndarray:
    """(H, W) float64 luma in [0, 1]."""
    gray = rgb_to_gray(img.detach().cpu().to(torch.float64).clamp(0.0, 1.0))
    return gray.reshape(gray.shape[-2:]).numpy()


def gray_uint8(img: ImageRGB) -> np.ndarray:
    return np.floor(gray_array(img) * 255.0 + 0.5).astype(np.uint8)


def ssim(a: ImageRGB, b: ImageRGB) -> float:
    """Single-scale SSIM with an 11-tap Gaussian window (sigma 1.5), K1=0.01, K2=0.03."""
    if a.shape != b.shape:
        raise ContractViolation(f"ssim shapes differ: {tuple(a.shape)} vs {tuple(b.shape)}")
    return float(
        structural_similarity(
            gray_array(a),
            gray_array(b),
            data_range=1.0,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
        )
    )


def rms_contrast(img: ImageRGB) -> float:
    return float(np.std(gray_array(img) * 255.0))


def laplacian_variance(img: ImageRGB) -> float:
    """Variance of the 4-neighbour Laplacian of 255-scaled gray, reflect-101 borders."""
    response = cv2.Laplacian(
        gray_array(img) * 255.0, cv2.CV_64F, ksize=1, borderType=cv2.BORDER_REFLECT_101
    )
    return float(response.var())
