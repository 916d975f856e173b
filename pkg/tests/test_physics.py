from __future__ import annotations

import itertools

import pytest
import torch

from aqualume.errors import ConfigError, ContractViolation
from aqualume.modules.physics import (
    PARAM_KEYS,
    ChannelTriple,
    DegradationParams,
    default_floor,
    degrade,
    estimate_backscatter,
    restore,
    transmission_maps,
)


def _params(t_d, t_b, b_inf, dtype=torch.float64) -> DegradationParams:
    return DegradationParams.from_triples((t_d,) * 3, (t_b,) * 3, (b_inf,) * 3, dtype=dtype)


def _scene(dtype=torch.float64, size=8) -> torch.Tensor:
    return torch.rand(3, size, size, dtype=dtype, generator=torch.Generator().manual_seed(1))


@pytest.mark.parametrize(
    "t_d,t_b,z", list(itertools.product([0.2, 0.5, 0.8, 0.99], [0.2, 0.6, 0.99], [0.0, 1.5, 6.0]))
)
def test_restore_inverts_degrade_in_float64(t_d, t_b, z):
    J = _scene()
    depth = torch.full((1, 8, 8), z, dtype=torch.float64)
    p = _params(t_d, t_b, 0.8)
    I = degrade(J, depth, p).raw  # noqa: E741
    recovered = restore(I, depth, p).raw
    assert torch.allclose(recovered, J, atol=1e-9, rtol=0)


def test_restore_inverts_degrade_in_float32_above_floor():
    J = _scene(torch.float32)
    depth = torch.linspace(0, 6, 8).view(1, 8, 1).expand(1, 8, 8).contiguous()
    p = _params(0.5, 0.7, 0.9, dtype=torch.float32)
    # 0.5**6 = 0.0156 stays above the 1e-3 floor
    recovered = restore(degrade(J, depth, p).raw, depth, p).raw
    assert torch.allclose(recovered, J, atol=1e-4)


def test_zero_depth_is_identity():
    J = _scene()
    out = degrade(J, torch.zeros(1, 8, 8, dtype=torch.float64), _params(0.3, 0.4, 0.9))
    assert torch.equal(out.image, J)
    assert torch.equal(out.raw, J)


def test_backscatter_is_monotone_and_saturates():
    depth = torch.linspace(0, 6, 50, dtype=torch.float64).view(1, 1, 50)
    p = _params(0.5, 0.3, 0.85)
    b = estimate_backscatter(depth, p)[0, 0]
    assert torch.all(b[1:] >= b[:-1])
    assert b[0].item() == 0.0
    assert b[-1].item() == pytest.approx(0.85 * (1 - 0.3**6))
    assert torch.all(b <= 0.85)


def test_degrade_clamps_image_but_keeps_raw():
    J = torch.ones(3, 2, 2, dtype=torch.float64)
    depth = torch.full((1, 2, 2), 3.0, dtype=torch.float64)
    out = degrade(J, depth, _params(0.95, 0.2, 1.0))
    assert out.raw.max() > 1.0
    assert out.image.max() == 1.0


def test_restore_floor_keeps_output_finite():
    I = torch.full((3, 2, 2), 0.9)  # noqa: E741
    depth = torch.full((1, 2, 2), 6.0)
    p = _params(0.2, 0.5, 0.6, dtype=torch.float32)
    raw = restore(I, depth, p).raw
    assert torch.isfinite(raw).all()
    direct = 0.2**6
    assert direct < default_floor(torch.float32)
    expected = (0.9 - 0.6 * (1 - 0.5**6)) / default_floor(torch.float32)
    assert raw[0, 0, 0].item() == pytest.approx(expected, rel=1e-4)


def test_default_floor_depends_on_dtype():
    assert default_floor(torch.float32) == 1e-3
    assert default_floor(torch.float64) == 1e-12


def test_transmission_maps_match_powers():
    depth = torch.full((1, 3, 3), 2.0, dtype=torch.float64)
    t_d, t_b = transmission_maps(depth, _params(0.5, 0.9, 0.7))
    assert torch.allclose(t_d, torch.full_like(t_d, 0.25))
    assert torch.allclose(t_b, torch.full_like(t_b, 0.81))


def test_batched_params_broadcast_per_image():
    J = torch.rand(2, 3, 4, 4, dtype=torch.float64)
    depth = torch.full((2, 1, 4, 4), 1.0, dtype=torch.float64)
    p = DegradationParams(
        t_d=torch.tensor([0.5, 0.9], dtype=torch.float64).view(2, 1, 1, 1).expand(2, 3, 1, 1),
        t_b=torch.full((2, 3, 1, 1), 0.5, dtype=torch.float64),
        b_inf=torch.full((2, 3, 1, 1), 0.8, dtype=torch.float64),
    )
    out = degrade(J, depth, p).raw
    assert torch.allclose(out[0], J[0] * 0.5 + 0.4)
    assert torch.allclose(out[1], J[1] * 0.9 + 0.4)
    assert p.batch_size == 2
    assert p.select(1).t_d.shape == (3, 1, 1)


def test_shape_mismatch_is_a_contract_violation():
    with pytest.raises(ContractViolation):
        degrade(torch.rand(3, 4, 4), torch.zeros(1, 5, 5), _params(0.5, 0.5, 0.8, torch.float32))
    with pytest.raises(ContractViolation):
        degrade(torch.rand(3, 4, 4), torch.zeros(2, 4, 4), _params(0.5, 0.5, 0.8, torch.float32))


def test_params_require_channel_shape():
    with pytest.raises(ContractViolation):
        DegradationParams(torch.zeros(3), torch.zeros(3, 1, 1), torch.zeros(3, 1, 1))


def test_beta_is_negative_log_transmission():
    p = _params(0.5, 0.25, 0.8)
    assert torch.allclose(p.beta_d, torch.full((3, 1, 1), 0.6931471805599453, dtype=torch.float64))
    assert torch.allclose(p.beta_b, 2 * p.beta_d)


def test_validate_reports_range_violations():
    p = DegradationParams.from_triples((0.5, 1.0, 0.5), (0.5, 0.5, 0.5), (0.5, 0.8, 0.8))
    problems = p.validate()
    assert any(v.startswith("t_d_g") for v in problems)
    assert any(v.startswith("b_inf_r") for v in problems)
    assert len(problems) == 2
    assert _params(0.5, 0.5, 0.8).validate() == []


def test_document_round_trip():
    p = DegradationParams.from_triples((0.2, 0.3, 0.4), (0.5, 0.6, 0.7), (0.6, 0.8, 1.0))
    doc = p.to_document()
    assert tuple(doc) == PARAM_KEYS
    again = DegradationParams.from_document(doc)
    assert again.triples()[2] == pytest.approx((0.6, 0.8, 1.0))
    assert isinstance(again.triples()[0], ChannelTriple)


def test_document_with_unknown_or_missing_keys_names_them():
    doc = _params(0.5, 0.5, 0.8).to_document()
    doc.pop("t_b_g")
    doc["t_x"] = 0.1
    with pytest.raises(ConfigError) as info:
        DegradationParams.from_document(doc)
    assert set(info.value.keys) == {"t_b_g", "t_x"}


def test_thousand_random_round_trips():
    generator = torch.Generator().manual_seed(0)

    def uniform(shape, lo, hi):
        return lo + (hi - lo) * torch.rand(shape, generator=generator, dtype=torch.float64)

    n = 1000
    J = uniform((n, 3, 4, 4), 0.05, 0.95)
    depth = uniform((n, 1, 4, 4), 0.0, 6.0)
    p = DegradationParams(
        t_d=uniform((n, 3, 1, 1), 0.2, 0.99),
        t_b=uniform((n, 3, 1, 1), 0.2, 0.99),
        b_inf=uniform((n, 3, 1, 1), 0.6, 1.0),
    )
    recovered = restore(degrade(J, depth, p).raw, depth, p).raw
    assert (recovered - J).abs().max().item() < 1e-5


def test_backscatter_saturates_far_away():
    depth = torch.full((1, 1, 1), 60.0, dtype=torch.float64)
    p = DegradationParams.from_triples((0.5,) * 3, (0.88, 0.7, 0.3), (0.6, 0.8, 1.0), torch.float64)
    b = estimate_backscatter(depth, p).reshape(-1)
    assert torch.allclose(b, torch.tensor([0.6, 0.8, 1.0], dtype=torch.float64), atol=1e-3)


def test_channels_are_independent():
    J = _scene()
    depth = torch.full((1, 8, 8), 2.0, dtype=torch.float64)
    base = degrade(J, depth, _params(0.5, 0.5, 0.8)).raw
    nudged = DegradationParams.from_triples(
        (0.6, 0.5, 0.5), (0.5,) * 3, (0.8,) * 3, dtype=torch.float64
    )
    out = degrade(J, depth, nudged).raw
    assert not torch.equal(out[0], base[0])
    assert torch.equal(out[1:], base[1:])


def _leaves():
    generator = torch.Generator().manual_seed(3)

    def leaf(shape, lo, hi):
        value = lo + (hi - lo) * torch.rand(shape, generator=generator, dtype=torch.float64)
        return value.requires_grad_(True)

    return (
        leaf((3, 2, 2), 0.1, 0.9),
        leaf((1, 2, 2), 0.5, 5.0),
        leaf((3, 1, 1), 0.3, 0.9),
        leaf((3, 1, 1), 0.3, 0.9),
        leaf((3, 1, 1), 0.65, 0.95),
    )


def test_degrade_gradients_match_finite_differences():
    def fn(J, z, t_d, t_b, b_inf):
        return degrade(J, z, DegradationParams(t_d, t_b, b_inf)).raw

    assert torch.autograd.gradcheck(fn, _leaves(), eps=1e-6, atol=1e-6, rtol=1e-3)


def test_restore_gradients_match_finite_differences():
    def fn(I, z, t_d, t_b, b_inf):  # noqa: E741
        return restore(I, z, DegradationParams(t_d, t_b, b_inf)).raw

    assert torch.autograd.gradcheck(fn, _leaves(), eps=1e-6, atol=1e-6, rtol=1e-3)
