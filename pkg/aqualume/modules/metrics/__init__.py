from .color import lab_u_index, u_index_from_lab, uciqe
from .features import feature_counts, harris_count, ratio_test_count, sift_match_count
from .models import UCIQE_WEIGHTS, FeatureCounts, LabUBreakdown, UciqeBreakdown
from .report import EvaluationSummary, evaluate_directory, score_image
from .structure import gray_array, gray_uint8, laplacian_variance, rms_contrast, ssim

__all__ = [
    "UCIQE_WEIGHTS",
    "EvaluationSummary",
    "FeatureCounts",
    "LabUBreakdown",
    "UciqeBreakdown",
    "evaluate_directory",
    "feature_counts",
    "gray_array",
    "gray_uint8",
    "harris_count",
    "lab_u_index",
    "laplacian_variance",
    "ratio_test_count",
    "rms_contrast",
    "score_image",
    "sift_match_count",
    "ssim",
    "u_index_from_lab",
    "uciqe",
]
