"""Physics generator: four sub-networks decoded through the image formation model."""

from __future__ import annotations

import torch
from torch import nn

from aqualume.errors import ContractViolation
from aqualume.modules.physics import DegradationParams, Rendered, degrade, restore

from .depth import DepthNet
from .encoders import CoefficientEncoder, transmission_from_logits, veiling_from_logits
from .models import Decomposition

SUB_MODULES = ("depth_net", "atten_encoder", "backscatter_encoder", "veiling_encoder")


class PhysicsGenerator(nn.Module):
    """Depth network plus attenuation, backscatter and veiling-light encoders.

    With ``hyp1`` the attenuation and backscatter encoders read the image
    concatenated with the estimated depth (4 channels); otherwise the image only.
    """

    def __init__(
        self,
        image_size: int = 256,
        ngf: int = 64,
        residual_blocks: int = 6,
        nef: int = 32,
        encoder_blocks: int = 4,
        hyp1: bool = True,
    ) -> None:
        super().__init__()
        self.hyp1 = hyp1
        coeff_channels = 4 if hyp1 else 3
        self.depth_net = DepthNet(ngf, residual_blocks, image_size)
        self.atten_encoder = CoefficientEncoder(coeff_channels, nef, encoder_blocks)
        self.backscatter_encoder = CoefficientEncoder(coeff_channels, nef, encoder_blocks)
        self.veiling_encoder = CoefficientEncoder(3, nef, encoder_blocks)

    def sub_modules(self) -> dict[str, nn.Module]:
        return {name: getattr(self, name) for name in SUB_MODULES}

    def forward(self, img: torch.Tensor) -> Decomposition:
        return decompose(self, img)


def _batched(img: torch.Tensor) -> tuple[torch.Tensor, bool]:
    if img.dim() == 3:
        return img.unsqueeze(0), True
    if img.dim() == 4:
        return img, False
    raise ContractViolation(f"expected (3, H, W) or (N, 3, H, W), got {tuple(img.shape)}")


def depth_forward(G: PhysicsGenerator, img: torch.Tensor) -> torch.Tensor:
    batch, single = _batched(img)
    depth = G.depth_net(batch)
    return depth[0] if single else depth


def coeff_forward(
    encoder: CoefficientEncoder,
    img: torch.Tensor,
    depth: torch.Tensor,
    use_depth: bool,
) -> torch.Tensor:
    """Per-channel transmissions in (0, 1), shaped (N, 3, 1, 1)."""
    batch, _ = _batched(img)
    expected = 4 if use_depth else 3
    if encoder.in_channels != expected:
        raise ContractViolation(
            f"encoder takes {encoder.in_channels} channels but use_depth={use_depth}"
        )
    if use_depth:
        depth_batch = depth if depth.dim() == 4 else depth.unsqueeze(0)
        batch = torch.cat([batch, depth_batch], dim=1)
    return transmission_from_logits(encoder(batch))


def veiling_forward(G: PhysicsGenerator, img: torch.Tensor) -> torch.Tensor:
    """Veiling light in [0.6, 1], shaped (N, 3, 1, 1)."""
    batch, _ = _batched(img)
    return veiling_from_logits(G.veiling_encoder(batch))


def decompose(G: PhysicsGenerator, img: torch.Tensor, hyp1: bool | None = None) -> Decomposition:
    hyp1 = G.hyp1 if hyp1 is None else hyp1
    if hyp1 != G.hyp1:
        raise ContractViolation(f"generator was built with hyp1={G.hyp1}, asked for {hyp1}")
    batch, single = _batched(img)
    depth = G.depth_net(batch)
    t_d = coeff_forward(G.atten_encoder, batch, depth, hyp1)
    t_b = coeff_forward(G.backscatter_encoder, batch, depth, hyp1)
    b_inf = veiling_forward(G, batch)
    decomposition = Decomposition(depth=depth, params=DegradationParams(t_d, t_b, b_inf))
    return decomposition.select(0) if single else decomposition


def generate_underwater(
    G: PhysicsGenerator, x_terrestrial: torch.Tensor
) -> tuple[Rendered, Decomposition]:
    """Terrestrial -> underwater: decompose x with G, then render through the model."""
    d = decompose(G, x_terrestrial)
    return degrade(x_terrestrial, d.depth, d.params), d


def generate_terrestrial(
    F: PhysicsGenerator, y_underwater: torch.Tensor
) -> tuple[Rendered, Decomposition]:
    """Underwater -> terrestrial: decompose y with F, then invert the model."""
    d = decompose(F, y_underwater)
    return restore(y_underwater, d.depth, d.params), d
