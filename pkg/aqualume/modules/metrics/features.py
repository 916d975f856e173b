"""Keypoint and corner counters built on OpenCV detectors."""

from __future__ import annotations

from collections.abc import Sequence

import cv2
import numpy as np

from aqualume.modules.imaging import ImageRGB

from .models import FeatureCounts
from .structure import gray_uint8

HARRIS_BLOCK = 2
HARRIS_APERTURE = 3
HARRIS_K = 0.04
HARRIS_RELATIVE_THRESHOLD = 0.01
RATIO_TEST = 0.75


def _sift(gray: np.ndarray) -> tuple[tuple, np.ndarray | None]:
    return cv2.SIFT_create().detectAndCompute(gray, None)


def harris_count(gray: np.ndarray) -> int:
    """Corners above 1% of the peak response that are 3x3 local maxima."""
    response = cv2.cornerHarris(np.float32(gray), HARRIS_BLOCK, HARRIS_APERTURE, HARRIS_K)
    peak = float(response.max())
    if peak <= 0:
        return 0
    local_max = response == cv2.dilate(response, np.ones((3, 3), np.uint8))
    return int(np.count_nonzero((response > HARRIS_RELATIVE_THRESHOLD * peak) & local_max))


def feature_counts(img: ImageRGB) -> FeatureCounts:
    gray = gray_uint8(img)
    keypoints, _ = _sift(gray)
    return FeatureCounts(sift=len(keypoints), harris=harris_count(gray))


def sift_match_count(a: ImageRGB, b: ImageRGB, ratio: float = RATIO_TEST) -> int:
    """SIFT matches from a to b that pass the ratio test."""
    _, desc_a = _sift(gray_uint8(a))
    _, desc_b = _sift(gray_uint8(b))
    if desc_a is None or desc_b is None or len(desc_a) == 0 or len(desc_b) == 0:
        return 0
    pairs = cv2.BFMatcher(cv2.NORM_L2).knnMatch(desc_a, desc_b, k=2)
    return ratio_test_count(pairs, ratio)


def ratio_test_count(pairs: Sequence[Sequence[cv2.DMatch]], ratio: float = RATIO_TEST) -> int:
    """Pairs whose nearest distance is within ``ratio`` of the second nearest.

    A query with a single candidate has no second neighbour to compare against
    and never counts.
    """
    return sum(
        1 for pair in pairs if len(pair) == 2 and pair[0].distance <= ratio * pair[1].distance
    )
