"""Colour statistics on CIELab: UCIQE and the Lab U-index."""

from __future__ import annotations

import logging
import math
from fractions import Fraction

import numpy as np
import torch

from aqualume.modules.imaging import ImageLab, ImageRGB, rgb_to_lab

from .models import LabUBreakdown, UciqeBreakdown

logger = logging.getLogger("aqualume.metrics.color")

SATURATION_EPS = 1e-6
SPAN_EPS = 1e-6
CONTRAST_FRACTION = Fraction(1, 100)
SPAN_PERCENTILES = (1.0, 99.0)


def _lab_planes(img: ImageRGB) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lab = rgb_to_lab(img.detach().cpu().to(torch.float64))
    return tuple(plane.reshape(-1).numpy() for plane in lab)  # type: ignore[return-value]


def uciqe(img: ImageRGB) -> UciqeBreakdown:
    """Chroma spread, luminance contrast and mean saturation, combined linearly.

    Chroma and lightness are scaled by 1/100; the contrast uses the mean of
    the brightest and darkest ceil(1% * N) pixels.
    """
    lightness, a, b = _lab_planes(img)
    chroma = np.hypot(a, b) / 100.0
    lum = lightness / 100.0

    sigma_c = float(np.std(chroma))
    k = max(1, math.ceil(CONTRAST_FRACTION * lightness.size))
    ordered = np.sort(lightness)
    con_l = float((ordered[-k:].mean() - ordered[:k].mean()) / 100.0)
    mu_s = float(np.mean(chroma / (lum + SATURATION_EPS)))
    return UciqeBreakdown.combine(sigma_c, con_l, mu_s)


def u_index_from_lab(lab: ImageLab) -> LabUBreakdown:
    """U = sqrt(d_o) / (a_l * d_a * d_b) with a, b on a 255 scale and 1-99 percentile spans."""
    lightness = lab.L.detach().cpu().to(torch.float64).reshape(-1).numpy()
    a = lab.a.detach().cpu().to(torch.float64).reshape(-1).numpy() / 255.0
    b = lab.b.detach().cpu().to(torch.float64).reshape(-1).numpy() / 255.0

    d_o = float(np.hypot(a.mean(), b.mean()))
    lo, hi = SPAN_PERCENTILES
    d_a = float(np.percentile(a, hi) - np.percentile(a, lo))
    d_b = float(np.percentile(b, hi) - np.percentile(b, lo))
    a_l = float(lightness.mean())

    degenerate = min(d_a, d_b, a_l) < SPAN_EPS
    if degenerate:
        logger.debug("Degenerate colour span floored", extra={"d_a": d_a, "d_b": d_b, "a_l": a_l})
        d_a, d_b, a_l = max(d_a, SPAN_EPS), max(d_b, SPAN_EPS), max(a_l, SPAN_EPS)
    u = math.sqrt(d_o) / (a_l * d_a * d_b)
    return LabUBreakdown(d_o, d_a, d_b, a_l, u, degenerate)


def lab_u_index(img: ImageRGB) -> LabUBreakdown:
    return u_index_from_lab(rgb_to_lab(img.detach().cpu().to(torch.float64)))
