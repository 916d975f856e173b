"""Training objectives: least-squares adversarial, cycle, perceptual, backscatter fidelity."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import torch
import torch.nn.functional as F

from aqualume.errors import ContractViolation
from aqualume.modules.dcp import BinaryMask
from aqualume.modules.networks import Decomposition
from aqualume.modules.physics import estimate_backscatter

from .models import LossWeights
from .perceptual import PerceptualEncoder


def adversarial_generator(fake_scores: Sequence[torch.Tensor]) -> torch.Tensor:
    """Mean over scales of mean((D(fake) - 1)^2)."""
    terms = [((score - 1.0) ** 2).mean() for score in fake_scores]
    return torch.stack(terms).mean()


def adversarial_discriminator(
    real_scores: Sequence[torch.Tensor], fake_scores: Sequence[torch.Tensor]
) -> torch.Tensor:
    """Mean over scales of mean((D(real) - 1)^2) + mean(D(fake)^2)."""
    if len(real_scores) != len(fake_scores):
        raise ContractViolation("real and fake score lists have different scale counts")
    terms = [
        ((real - 1.0) ** 2).mean() + (fake**2).mean()
        for real, fake in zip(real_scores, fake_scores, strict=True)
    ]
    return torch.stack(terms).mean()


def cycle_consistency(
    x: torch.Tensor, x_rec: torch.Tensor, y: torch.Tensor, y_rec: torch.Tensor
) -> torch.Tensor:
    if x.shape != x_rec.shape or y.shape != y_rec.shape:
        raise ContractViolation("cycle reconstruction shapes differ from their sources")
    return F.l1_loss(x_rec, x) + F.l1_loss(y_rec, y)


def perceptual(
    orig: torch.Tensor, recov: torch.Tensor, encoder: PerceptualEncoder
) -> torch.Tensor:
    """Mean squared relu3_3 feature difference over channels and the spatial domain."""
    with torch.no_grad():
        target = encoder(orig)
    return F.mse_loss(encoder(recov), target)


def backscatter_fidelity(
    I: torch.Tensor,  # noqa: E741
    d: Decomposition,
    M: BinaryMask,
) -> torch.Tensor:
    """Mean over masked pixels and channels of |I - B_inf (1 - t_B^z)|.

    Only meaningful for images in the underwater domain. The mask is a constant.
    """
    mask = M.detach()
    count = mask.sum()
    if float(count) <= 0:
        raise ContractViolation("backscatter mask selects no pixels")
    estimate = estimate_backscatter(d.depth, d.params)
    error = (I - estimate).abs() * mask
    return error.sum() / (count * I.shape[-3])


def total(
    components: Mapping[str, torch.Tensor | float], w: LossWeights
) -> torch.Tensor | float:
    """lambda_g L_G + lambda_c L_cycle + lambda_p L_perc + lambda_B L_B (L_D excluded)."""
    return (
        w.lambda_g * components["l_g"]
        + w.lambda_c * components["l_cycle"]
        + w.lambda_p * components["l_perc"]
        + w.lambda_B * components["l_bhat"]
    )
