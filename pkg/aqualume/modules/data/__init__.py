from .dataset import UnpairedBatcher, load_or_skip, next_batch
from .models import SyntheticSample, UnpairedDataset
from .samples import procedural_scene, write_sample_set
from .synthetic import (
    ParamSampler,
    constant_depth,
    depth_from_descriptor,
    gradient_depth,
    make_synthetic,
)

__all__ = [
    "ParamSampler",
    "SyntheticSample",
    "UnpairedBatcher",
    "UnpairedDataset",
    "constant_depth",
    "depth_from_descriptor",
    "gradient_depth",
    "load_or_skip",
    "make_synthetic",
    "next_batch",
    "procedural_scene",
    "write_sample_set",
]
