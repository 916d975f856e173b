from __future__ import annotations

import copy

import pytest
import torch

from aqualume.errors import ContractViolation
from aqualume.modules.dcp import darkest_mask, dcp_map
from aqualume.modules.losses import (
    LossReport,
    LossWeights,
    adversarial_discriminator,
    adversarial_generator,
    backscatter_fidelity,
    cycle_consistency,
    perceptual,
    total,
)
from aqualume.modules.networks import Decomposition
from aqualume.modules.physics import DegradationParams, degrade


def test_adversarial_generator_values():
    assert adversarial_generator([torch.ones(1, 1, 4, 4)]).item() == 0.0
    assert adversarial_generator([torch.zeros(1, 1, 4, 4), torch.ones(1, 1, 2, 2)]).item() == 0.5


def test_adversarial_discriminator_values():
    ones, zeros = torch.ones(2, 1, 4, 4), torch.zeros(2, 1, 4, 4)
    assert adversarial_discriminator([ones], [zeros]).item() == 0.0
    assert adversarial_discriminator([zeros], [ones]).item() == 2.0
    with pytest.raises(ContractViolation):
        adversarial_discriminator([ones, ones], [zeros])


def test_adversarial_losses_at_the_midpoint():
    half = [torch.full((2, 1, 8, 8), 0.5), torch.full((2, 1, 4, 4), 0.5)]
    assert adversarial_generator(half).item() == 0.25
    assert adversarial_discriminator(half, half).item() == 0.5


def test_cycle_consistency_is_l1():
    x = torch.zeros(1, 3, 4, 4)
    y = torch.ones(1, 3, 4, 4)
    assert cycle_consistency(x, x + 0.25, y, y).item() == pytest.approx(0.25)
    with pytest.raises(ContractViolation):
        cycle_consistency(x, torch.zeros(1, 3, 2, 2), y, y)


def test_perceptual_zero_for_identical_images(perceptual_encoder):
    img = torch.rand(2, 3, 32, 32, generator=torch.Generator().manual_seed(0))
    assert perceptual(img, img.clone(), perceptual_encoder).item() == 0.0
    other = torch.rand(2, 3, 32, 32, generator=torch.Generator().manual_seed(1))
    assert perceptual(img, other, perceptual_encoder).item() > 0.0


def test_perceptual_gradient_flows_to_recovered_only(perceptual_encoder):
    orig = torch.rand(1, 3, 32, 32, requires_grad=True)
    recov = torch.rand(1, 3, 32, 32, requires_grad=True)
    perceptual(orig, recov, perceptual_encoder).backward()
    assert orig.grad is None
    assert recov.grad is not None
    assert all(not p.requires_grad for p in perceptual_encoder.parameters())


def _decomposition(depth: torch.Tensor) -> Decomposition:
    params = DegradationParams.from_triples(
        (0.5, 0.6, 0.7), (0.4, 0.5, 0.6), (0.7, 0.8, 0.9), dtype=torch.float64
    )
    return Decomposition(depth, params)


def test_backscatter_fidelity_zero_when_model_is_exact():
    depth = torch.full((1, 16, 16), 6.0, dtype=torch.float64)
    d = _decomposition(depth)
    # black scene: the rendered image is pure backscatter
    underwater = degrade(torch.zeros(3, 16, 16, dtype=torch.float64), depth, d.params).raw
    mask = darkest_mask(dcp_map(underwater), fraction=0.1)
    assert backscatter_fidelity(underwater, d, mask).item() == pytest.approx(0.0, abs=1e-12)


def test_backscatter_fidelity_averages_masked_pixels_only():
    depth = torch.zeros(1, 4, 4, dtype=torch.float64)
    d = _decomposition(depth)
    # zero depth: the estimate is 0 everywhere
    img = torch.full((3, 4, 4), 0.5, dtype=torch.float64)
    img[:, 3, 3] = 10.0
    mask = torch.zeros(1, 4, 4, dtype=torch.float64)
    mask[0, 0, 0] = 1.0
    assert backscatter_fidelity(img, d, mask).item() == pytest.approx(0.5)


def test_backscatter_fidelity_rejects_empty_mask():
    d = _decomposition(torch.ones(1, 4, 4, dtype=torch.float64))
    with pytest.raises(ContractViolation):
        backscatter_fidelity(torch.rand(3, 4, 4, dtype=torch.float64), d, torch.zeros(1, 4, 4))


def test_total_excludes_discriminator_loss():
    components = {"l_g": 1.0, "l_d": 100.0, "l_cycle": 1.0, "l_perc": 1.0, "l_bhat": 1.0}
    assert total(components, LossWeights()) == pytest.approx(3.0 + 4.0 + 0.1 + 2.0)
    weights = LossWeights(lambda_g=0, lambda_c=1, lambda_p=0, lambda_B=0)
    assert total(components, weights) == pytest.approx(1.0)


def test_loss_weights_reject_negative_and_unknown():
    with pytest.raises(ValueError):
        LossWeights(lambda_g=-1)
    with pytest.raises(ValueError):
        LossWeights(lambda_x=1)


def test_loss_report_finiteness():
    report = LossReport(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    assert report.is_finite()
    assert list(report.as_dict()) == list(LossReport.FIELDS)
    assert not LossReport(1.0, float("nan"), 0, 0, 0, 0).is_finite()


@pytest.mark.parametrize("seed", range(10))
def test_backscatter_fidelity_matches_loop(seed):
    generator = torch.Generator().manual_seed(seed)
    img = torch.rand(3, 6, 6, generator=generator, dtype=torch.float64)
    depth = 6 * torch.rand(1, 6, 6, generator=generator, dtype=torch.float64)
    d = _decomposition(depth)
    mask = darkest_mask(dcp_map(img), fraction=0.25)

    t_b, b_inf = d.params.t_b.reshape(-1).tolist(), d.params.b_inf.reshape(-1).tolist()
    total_error, count = 0.0, 0
    for r in range(6):
        for c in range(6):
            if mask[0, r, c] == 0:
                continue
            count += 1
            z = depth[0, r, c].item()
            for ch in range(3):
                total_error += abs(img[ch, r, c].item() - b_inf[ch] * (1 - t_b[ch] ** z))
    expected = total_error / (3 * count)
    assert backscatter_fidelity(img, d, mask).item() == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_perceptual_matches_loop(perceptual_encoder, seed):
    encoder = copy.deepcopy(perceptual_encoder).double()
    generator = torch.Generator().manual_seed(seed)
    orig = torch.rand(1, 3, 16, 16, generator=generator, dtype=torch.float64)
    recov = torch.rand(1, 3, 16, 16, generator=generator, dtype=torch.float64)
    with torch.no_grad():
        a = encoder(orig).reshape(-1).tolist()
        b = encoder(recov).reshape(-1).tolist()
    expected = sum((x - y) ** 2 for x, y in zip(a, b, strict=True)) / len(a)
    assert perceptual(orig, recov, encoder).item() == pytest.approx(expected, rel=1e-9, abs=1e-9)
