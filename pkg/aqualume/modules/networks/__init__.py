from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .depth import DepthNet, depth_from_raw
from .discriminator import MultiScaleDiscriminator, PatchDiscriminator, discriminate
from .encoders import CoefficientEncoder
from .generator import (
    SUB_MODULES,
    PhysicsGenerator,
    coeff_forward,
    decompose,
    depth_forward,
    generate_terrestrial,
    generate_underwater,
    veiling_forward,
)
from .init import init_weights
from .models import Decomposition

__all__ = [
    "FORMAT_VERSION",
    "SUB_MODULES",
    "CoefficientEncoder",
    "Decomposition",
    "DepthNet",
    "MultiScaleDiscriminator",
    "PatchDiscriminator",
    "PhysicsGenerator",
    "coeff_forward",
    "decompose",
    "depth_forward",
    "depth_from_raw",
    "discriminate",
    "generate_terrestrial",
    "generate_underwater",
    "init_weights",
    "load_checkpoint",
    "save_checkpoint",
    "veiling_forward",
]
