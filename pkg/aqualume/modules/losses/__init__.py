from .models import LossReport, LossWeights
from .perceptual import PerceptualEncoder
from .service import (
    adversarial_discriminator,
    adversarial_generator,
    backscatter_fidelity,
    cycle_consistency,
    perceptual,
    total,
)

__all__ = [
    "LossReport",
    "LossWeights",
    "PerceptualEncoder",
    "adversarial_discriminator",
    "adversarial_generator",
    "backscatter_fidelity",
    "cycle_consistency",
    "perceptual",
    "total",
]
