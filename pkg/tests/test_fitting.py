from __future__ import annotations

import numpy as np
import pytest
import torch

from aqualume.errors import FitNotConverged
from aqualume.modules.data import ParamSampler, make_synthetic
from aqualume.modules.physics import fit_constant_params


@pytest.mark.parametrize("seed", range(20))
def test_fit_recovers_sampled_params(textured_image, seed):
    sample = make_synthetic(textured_image, "gradient", ParamSampler.seeded(seed))
    result = fit_constant_params(sample.degraded, sample.clean, sample.depth)
    assert not result.degenerate
    for fitted, truth in zip(result.params.triples(), sample.params.triples(), strict=True):
        assert np.allclose(fitted, truth, atol=1e-3)
    assert result.residual < 1e-6


def test_zero_depth_is_flagged_degenerate(textured_image):
    depth = torch.zeros(1, *textured_image.shape[-2:], dtype=torch.float64)
    result = fit_constant_params(textured_image, textured_image, depth)
    assert result.degenerate
    assert result.residual == 0.0


def test_identity_pair_lands_on_the_boundary(textured_image):
    depth = torch.linspace(0, 6, 64, dtype=torch.float64).view(1, 64, 1).expand(1, 64, 64)
    result = fit_constant_params(textured_image, textured_image, depth)
    assert result.at_boundary
    assert result.residual < 1e-12


def test_inconsistent_pair_raises_with_best_residual(textured_image):
    depth = torch.linspace(0, 6, 64, dtype=torch.float64).view(1, 64, 1).expand(1, 64, 64)
    noise = torch.rand(textured_image.shape, generator=torch.Generator().manual_seed(9))
    with pytest.raises(FitNotConverged) as info:
        fit_constant_params(noise.double(), textured_image, depth)
    assert info.value.best_residual > info.value.threshold
