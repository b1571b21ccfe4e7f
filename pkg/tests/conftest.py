import numpy as np
import pytest

from dfdkit.raster import CameraParams, DepthMap, RgbImage


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cam():
    # 9 mm lens at F/2 focused at 0.7 m, 7.5 um pitch
    return CameraParams()


def random_image(rng, h, w):
    return RgbImage(rng.random((h, w, 3), dtype=np.float32))


def two_level_depth(h, w, near=0.7, far=3.0):
    """Left half at `near`, right half at `far`."""
    d = np.full((h, w), near, dtype=np.float32)
    d[:, w // 2:] = far
    return DepthMap(d)
