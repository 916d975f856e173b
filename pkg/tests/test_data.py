from __future__ import annotations

import logging

import numpy as np
import pytest
import torch

from aqualume.errors import ContractViolation
from aqualume.modules.data import (
    ParamSampler,
    UnpairedBatcher,
    UnpairedDataset,
    depth_from_descriptor,
    make_synthetic,
    next_batch,
    write_sample_set,
)
from aqualume.modules.imaging import list_images, save_image
from aqualume.modules.physics import degrade


def _batcher(dirs, batch_size=2, seed=0, jobs=1) -> UnpairedBatcher:
    underwater, terrestrial = dirs
    ds = UnpairedDataset.from_dirs(underwater, terrestrial, image_size=64)
    return UnpairedBatcher(ds, batch_size, np.random.default_rng(seed), jobs=jobs)


def _drain(batcher: UnpairedBatcher) -> list[tuple[torch.Tensor, torch.Tensor]]:
    batcher.start_epoch()
    batches = []
    while (batch := batcher.next_batch()) is not None:
        batches.append(batch)
    return batches


def test_dataset_needs_both_domains(tmp_path):
    with pytest.raises(ContractViolation):
        UnpairedDataset([], [tmp_path / "a.png"])


def test_remainder_batches_are_dropped(tmp_path):
    paths = [tmp_path / f"{i}.png" for i in range(2076)]
    assert UnpairedDataset(paths, paths).batches_per_epoch(16) == 129


def test_batches_have_requested_shape(sample_dirs):
    batches = _drain(_batcher(sample_dirs, batch_size=3))
    assert len(batches) == 2
    x, y = batches[0]
    assert x.shape == (3, 3, 64, 64) and y.shape == (3, 3, 64, 64)


def test_single_image_batches(sample_dirs):
    batcher = _batcher(sample_dirs, batch_size=1)
    x, y = next_batch(batcher, 1)
    assert x.shape == (1, 3, 64, 64) and y.shape == (1, 3, 64, 64)


def test_same_seed_gives_same_sequence(sample_dirs):
    first = _drain(_batcher(sample_dirs, seed=5))
    second = _drain(_batcher(sample_dirs, seed=5))
    for (x1, y1), (x2, y2) in zip(first, second, strict=True):
        assert torch.equal(x1, x2) and torch.equal(y1, y2)


def test_epoch_visits_each_file_once(sample_dirs):
    batches = _drain(_batcher(sample_dirs, batch_size=1))
    assert len(batches) == 8
    xs = torch.cat([x for x, _ in batches])
    flat = xs.flatten(1)
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            assert not torch.equal(flat[i], flat[j])


def test_domains_are_shuffled_independently(sample_dirs):
    batcher = _batcher(sample_dirs, seed=11)
    batcher.start_epoch()
    orders = batcher.state_dict()["orders"]
    assert sorted(orders["terrestrial"]) == list(range(8))
    assert sorted(orders["underwater"]) == list(range(8))
    assert orders["terrestrial"] != orders["underwater"]


def test_threaded_loading_keeps_order(sample_dirs):
    serial = _drain(_batcher(sample_dirs, seed=2))
    threaded = _drain(_batcher(sample_dirs, seed=2, jobs=2))
    for (x1, y1), (x2, y2) in zip(serial, threaded, strict=True):
        assert torch.equal(x1, x2) and torch.equal(y1, y2)


def test_state_dict_resumes_the_sequence(sample_dirs):
    batcher = _batcher(sample_dirs, batch_size=2, seed=4)
    batcher.start_epoch()
    batcher.next_batch()
    state = batcher.state_dict()
    expected = batcher.next_batch()

    resumed = _batcher(sample_dirs, batch_size=2, seed=99)
    resumed.load_state_dict(state)
    got = resumed.next_batch()
    assert torch.equal(got[0], expected[0]) and torch.equal(got[1], expected[1])


def test_unreadable_files_are_skipped(tmp_path, caplog):
    underwater = tmp_path / "underwater"
    terrestrial = tmp_path / "terrestrial"
    for directory, count in ((underwater, 3), (terrestrial, 4)):
        for i in range(count):
            save_image(torch.full((3, 8, 8), i / 4), directory / f"img_{i}.png")
    (underwater / "img_broken.png").write_bytes(b"garbage")

    ds = UnpairedDataset.from_dirs(underwater, terrestrial, image_size=8)
    batcher = UnpairedBatcher(ds, 1, np.random.default_rng(0))
    with caplog.at_level(logging.WARNING, logger="aqualume.data"):
        batches = _drain(batcher)
    assert len(batches) == 3
    assert any("unreadable" in record.message for record in caplog.records)


def test_synthetic_constant_zero_depth_is_clean(textured_image):
    sample = make_synthetic(textured_image, 0.0, ParamSampler.seeded(0))
    assert torch.equal(sample.degraded, sample.clean)
    assert sample.depth_descriptor == "constant:0.0"


def test_synthetic_is_reproducible_and_exact(textured_image):
    a = make_synthetic(textured_image, "gradient", ParamSampler.seeded(3))
    b = make_synthetic(textured_image, "gradient", ParamSampler.seeded(3))
    assert torch.equal(a.degraded, b.degraded)
    assert torch.equal(a.degraded, degrade(a.clean, a.depth, a.params).image)


def test_sampler_respects_ranges():
    sampler = ParamSampler.seeded(0)
    for _ in range(20):
        t_d, t_b, b_inf = sampler.sample().triples()
        assert all(0.2 <= v <= 0.99 for v in (*t_d, *t_b))
        assert all(0.6 <= v <= 1.0 for v in b_inf)


def test_depth_descriptors(tmp_path):
    constant = depth_from_descriptor("constant:2.5", 4)
    assert constant.shape == (1, 4, 4) and torch.all(constant == 2.5)

    gradient = depth_from_descriptor("gradient", (5, 3))
    assert torch.all(gradient[0, 0] == 6.0) and torch.all(gradient[0, -1] == 0.0)

    array = np.full((6, 6), 1.25)
    np.save(tmp_path / "depth.npy", array)
    from_file = depth_from_descriptor(f"file:{tmp_path / 'depth.npy'}", 6)
    assert torch.allclose(from_file, torch.full((1, 6, 6), 1.25, dtype=torch.float64))


@pytest.mark.parametrize("descriptor", ["constant:7", "constant:abc", "spiral"])
def test_bad_depth_descriptors(descriptor):
    with pytest.raises(ContractViolation):
        depth_from_descriptor(descriptor, 4)


def test_sample_set_layout(tmp_path):
    underwater, terrestrial = write_sample_set(tmp_path, count=3, seed=1, size=32)
    assert len(list_images(underwater)) == 3
    assert len(list_images(terrestrial)) == 3
    assert len(list((tmp_path / "manifests").glob("*.yaml"))) == 3
