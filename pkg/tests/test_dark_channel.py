import numpy as np
import pytest

from dfdkit.dark_channel import dark_channel
from dfdkit.raster import RgbImage

from conftest import random_image


def brute_force_dark_channel(img_data, window):
    """Independent oracle: explicit double loop, window clipped to bounds."""
    h, w, _ = img_data.shape
    half = window // 2
    out = np.empty((h, w), dtype=img_data.dtype)
    for i in range(h):
        for j in range(w):
            patch = img_data[max(0, i - half):i + half + 1,
                             max(0, j - half):j + half + 1]
            out[i, j] = patch.min()
    return out


def test_constant_image():
    img = RgbImage(np.full((6, 5, 3), 0.5, dtype=np.float32))
    for window in (1, 3, 15):
        assert np.all(dark_channel(img, window).data == np.float32(0.5))


def test_center_minimum_spreads_over_window():
    data = np.ones((3, 3, 3), dtype=np.float32)
    data[1, 1] = (0.9, 0.2, 0.7)
    out = dark_channel(RgbImage(data), 3)
    assert np.all(out.data == np.float32(0.2))


def test_window_one_is_channel_min(rng):
    img = random_image(rng, 7, 9)
    out = dark_channel(img, 1)
    assert np.array_equal(out.data, img.data.min(axis=2))


def test_invalid_window():
    img = RgbImage(np.zeros((2, 2, 3), dtype=np.float32))
    for bad in (0, -3, 2, 4):
        with pytest.raises(ValueError, match="odd"):
            dark_channel(img, bad)


def test_matches_brute_force_exactly(rng):
    for _ in range(5):
        img = random_image(rng, 32, 32)
        for window in (1, 3, 5, 15):
            got = dark_channel(img, window).data
            want = brute_force_dark_channel(img.data, window)
            assert np.array_equal(got, want)


def test_window_larger_than_image(rng):
    img = random_image(rng, 4, 3)
    out = dark_channel(img, 15)
    assert np.all(out.data == img.data.min())


def test_bounded_by_channel_min_and_monotone_in_window(rng):
    img = random_image(rng, 16, 12)
    channel_min = img.data.min(axis=2)
    prev = None
    for window in (1, 3, 5, 7, 15):
        cur = dark_channel(img, window).data
        assert np.all(cur <= channel_min)
        if prev is not None:
            assert np.all(cur <= prev)  # larger window never increases the min
        prev = cur
