from .fitting import FitResult, fit_constant_params
from .models import PARAM_KEYS, ChannelTriple, DegradationParams, DepthMap
from .service import (
    DEPTH_MAX,
    Rendered,
    default_floor,
    degrade,
    estimate_backscatter,
    restore,
    transmission_maps,
)

__all__ = [
    "DEPTH_MAX",
    "PARAM_KEYS",
    "ChannelTriple",
    "DegradationParams",
    "DepthMap",
    "FitResult",
    "Rendered",
    "default_floor",
    "degrade",
    "estimate_backscatter",
    "fit_constant_params",
    "restore",
    "transmission_maps",
]
