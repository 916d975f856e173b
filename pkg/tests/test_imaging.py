from __future__ import annotations

import logging

import pytest
import torch
from PIL import Image

from aqualume.errors import ContractViolation, ImageReadError
from aqualume.modules.imaging import (
    compose_grid,
    lab_to_rgb,
    list_images,
    load_image,
    resize_image,
    rgb_to_gray,
    rgb_to_lab,
    save_image,
)


def test_lab_round_trip_float64():
    img = torch.rand(3, 16, 16, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
    back = lab_to_rgb(rgb_to_lab(img))
    assert torch.allclose(back, img, atol=1e-9)


@pytest.mark.parametrize("level", [0.0, 0.18, 0.5, 1.0])
def test_achromatic_pixels_have_zero_chroma(level):
    img = torch.full((3, 4, 4), level, dtype=torch.float64)
    lab = rgb_to_lab(img)
    assert torch.count_nonzero(lab.a) == 0
    assert torch.count_nonzero(lab.b) == 0


def test_white_is_lightness_100():
    lab = rgb_to_lab(torch.ones(3, 2, 2, dtype=torch.float64))
    assert torch.allclose(lab.L, torch.full_like(lab.L, 100.0), atol=1e-9)


def test_lab_rejects_wrong_channel_count():
    with pytest.raises(ContractViolation):
        rgb_to_lab(torch.zeros(4, 2, 2))


def test_gray_uses_bt601_weights():
    img = torch.zeros(3, 1, 1, dtype=torch.float64)
    img[0] = 1.0
    assert rgb_to_gray(img).item() == pytest.approx(0.299)
    img = torch.zeros(3, 1, 1, dtype=torch.float64)
    img[2] = 1.0
    assert rgb_to_gray(img).item() == pytest.approx(0.114)


def test_save_then_load_is_lossless_on_8bit_values(tmp_path):
    levels = torch.randint(0, 256, (3, 8, 8), generator=torch.Generator().manual_seed(3))
    img = levels.double() / 255.0
    path = save_image(img, tmp_path / "nested" / "img.png")
    loaded = load_image(path)
    assert torch.equal(torch.round(loaded * 255).long(), levels)


def test_save_clamps_out_of_range(tmp_path):
    img = torch.tensor([-0.5, 0.5, 1.5]).view(3, 1, 1)
    loaded = load_image(save_image(img, tmp_path / "c.png"))
    assert loaded.flatten().tolist() == pytest.approx([0.0, 128 / 255, 1.0])


def test_grayscale_file_loads_as_three_equal_channels(tmp_path):
    path = tmp_path / "gray.png"
    Image.new("L", (5, 4), color=77).save(path)
    img = load_image(path)
    assert img.shape == (3, 4, 5)
    assert torch.equal(img[0], img[1]) and torch.equal(img[1], img[2])


def test_load_resizes_to_square(tmp_path):
    path = tmp_path / "rect.png"
    Image.new("RGB", (40, 20), color=(10, 20, 30)).save(path)
    assert load_image(path, 32).shape == (3, 32, 32)


def test_unreadable_file_raises_image_read_error(tmp_path):
    path = tmp_path / "broken.png"
    path.write_bytes(b"not a png")
    with pytest.raises(ImageReadError) as info:
        load_image(path)
    assert info.value.path == str(path)


def test_list_images_is_sorted_and_warns_on_other_files(tmp_path, caplog):
    for name in ("b.png", "a.jpg", "c.JPEG"):
        Image.new("RGB", (2, 2)).save(tmp_path / name, format="PNG")
    (tmp_path / "notes.txt").write_text("hello")
    with caplog.at_level(logging.WARNING, logger="aqualume.imaging"):
        listed = list_images(tmp_path)
    assert [p.name for p in listed] == ["a.jpg", "b.png", "c.JPEG"]
    assert any("non-image" in record.message for record in caplog.records)


def test_list_images_requires_directory(tmp_path):
    with pytest.raises(ImageReadError):
        list_images(tmp_path / "missing")


def test_resize_keeps_batch_layout():
    batch = torch.rand(2, 3, 16, 16)
    assert resize_image(batch, (8, 8)).shape == (2, 3, 8, 8)
    single = torch.rand(1, 16, 16)
    assert resize_image(single, (16, 16)) is single


def test_compose_grid_layout():
    cell = torch.zeros(3, 8, 8)
    grid = compose_grid([[cell] * 3, [cell] * 3], gap=4)
    assert grid.shape == (3, 2 * 8 + 4, 3 * 8 + 2 * 4)
    # gap stays at the fill value
    assert torch.all(grid[:, 8:12, :] == 1.0)
    assert torch.all(grid[:, :8, :8] == 0.0)


def test_compose_grid_rejects_mixed_sizes():
    with pytest.raises(ContractViolation):
        compose_grid([[torch.zeros(3, 8, 8), torch.zeros(3, 4, 4)]])
