from __future__ import annotations

import math

import pytest
import torch

from aqualume.errors import ContractViolation
from aqualume.modules.dcp import darkest_mask, dcp_map, mask_size, masked_overlay


def test_dcp_map_is_channel_minimum():
    img = torch.tensor([0.2, 0.5, 0.9]).view(3, 1, 1).expand(3, 4, 4).clone()
    img[1, 0, 0] = 0.05
    dcp = dcp_map(img)
    assert dcp.shape == (1, 4, 4)
    assert dcp[0, 0, 0].item() == pytest.approx(0.05)
    assert dcp[0, 3, 3].item() == pytest.approx(0.2)


def test_dcp_map_rejects_non_rgb():
    with pytest.raises(ContractViolation):
        dcp_map(torch.rand(1, 4, 4))


@pytest.mark.parametrize(
    "height,width,fraction,cap,expected",
    [
        (256, 256, 0.01, 10_000, 656),
        (256, 256, 1.0, 10_000, 10_000),
        (64, 64, 0.01, 10_000, 41),
        (10, 10, 0.01, 10_000, 1),
        (1000, 1000, 0.01, 10_000, 10_000),
    ],
)
def test_mask_size(height, width, fraction, cap, expected):
    assert mask_size(height, width, fraction, cap) == expected


@pytest.mark.parametrize("fraction,cap", [(0.0, 10), (1.5, 10), (0.1, 0)])
def test_mask_size_rejects_bad_arguments(fraction, cap):
    with pytest.raises(ContractViolation):
        mask_size(8, 8, fraction, cap)


def test_darkest_mask_selects_exactly_k_pixels():
    img = torch.rand(3, 256, 256, generator=torch.Generator().manual_seed(0))
    mask = darkest_mask(dcp_map(img))
    assert mask.shape == (1, 256, 256)
    assert int(mask.sum()) == 656
    assert set(mask.unique().tolist()) <= {0.0, 1.0}


def test_darkest_mask_picks_the_darkest_values():
    img = torch.rand(3, 32, 32, generator=torch.Generator().manual_seed(3))
    dcp = dcp_map(img)
    mask = darkest_mask(dcp, fraction=0.05)
    selected = dcp[mask.bool()]
    rejected = dcp[~mask.bool()]
    assert selected.max() <= rejected.min()


def test_fraction_one_is_capped():
    mask = darkest_mask(torch.rand(1, 256, 256), fraction=1.0)
    assert int(mask.sum()) == 10_000


def test_ties_resolve_in_row_major_order():
    mask = darkest_mask(torch.full((1, 64, 64), 0.5))
    flat = mask.reshape(-1)
    assert flat[:41].sum() == 41
    assert flat[41:].sum() == 0


def test_batched_masks_are_per_image():
    batch = torch.rand(4, 3, 64, 64, generator=torch.Generator().manual_seed(5))
    mask = darkest_mask(dcp_map(batch))
    assert mask.shape == (4, 1, 64, 64)
    assert mask.sum(dim=(1, 2, 3)).tolist() == [41.0] * 4
    single = darkest_mask(dcp_map(batch[2]))
    assert torch.equal(mask[2], single)


def test_mask_carries_no_gradient():
    img = torch.rand(3, 16, 16, requires_grad=True)
    mask = darkest_mask(dcp_map(img))
    assert not mask.requires_grad


def test_overlay_blacks_out_unselected_pixels():
    img = torch.rand(3, 16, 16, generator=torch.Generator().manual_seed(2))
    mask = darkest_mask(dcp_map(img), fraction=0.1)
    overlay = masked_overlay(img, mask)
    assert torch.equal(overlay[:, ~mask[0].bool()], torch.zeros_like(overlay[:, ~mask[0].bool()]))
    assert torch.equal(overlay[:, mask[0].bool()], img[:, mask[0].bool()])


@pytest.mark.parametrize("size", [64, 256, 512])
def test_mask_exactness_across_sizes(size):
    generator = torch.Generator().manual_seed(size)
    expected = min(math.ceil(0.01 * size * size - 1e-9), 10_000)
    for _ in range(5):
        dcp = dcp_map(torch.rand(3, size, size, generator=generator))
        mask = darkest_mask(dcp).bool()
        assert int(mask.sum()) == expected
        assert dcp[mask].max() <= dcp[~mask].min()
