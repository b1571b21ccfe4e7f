import numpy as np
import cv2
import pytest

from dfdkit.raster import (
    CameraParams,
    DepthMap,
    FileFormatError,
    RgbImage,
    ScalarMap,
    read_depth,
    read_map,
    read_rgb,
    write_map,
    write_rgb,
)


def _write_png_rgb(path, rgb_array):
    """Test helper: write an RGB array (R,G,B channel order) via cv2 (BGR)."""
    assert cv2.imwrite(str(path), rgb_array[:, :, ::-1])


class TestTypes:
    def test_rgb_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RgbImage(np.full((2, 2, 3), 1.5, dtype=np.float32))
        with pytest.raises(ValueError):
            RgbImage(np.full((2, 2, 3), -0.1, dtype=np.float32))

    def test_rgb_rejects_nonfinite_and_bad_shape(self):
        bad = np.zeros((2, 2, 3), dtype=np.float32)
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            RgbImage(bad)
        with pytest.raises(ValueError):
            RgbImage(np.zeros((2, 2), dtype=np.float32))

    def test_scalar_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ScalarMap(np.array([[np.inf]]))

    def test_depth_invariants(self):
        with pytest.raises(ValueError):
            DepthMap(np.array([[0.0]]))  # nonpositive valid sample
        with pytest.raises(ValueError):
            DepthMap(np.array([[11.0]]))  # above default d_max
        DepthMap(np.array([[10.0]]))  # boundary is inclusive
        DepthMap(np.array([[11.0]]), d_max=20.0)
        # invalid pixels may hold the 0 sentinel
        d = DepthMap(np.array([[0.0, 1.0]]), valid=np.array([[False, True]]))
        assert d.valid.sum() == 1

    def test_camera_params(self):
        cam = CameraParams()
        assert cam.aperture == cam.focal_length / cam.f_number
        with pytest.raises(ValueError):
            CameraParams(focal_length=-1)
        with pytest.raises(ValueError):
            CameraParams(f_number=0)
        with pytest.raises(ValueError):
            CameraParams(focus_distance=0.005)  # below focal length
        with pytest.raises(ValueError):
            CameraParams(pixel_pitch=0)


class TestReadRgb:
    def test_8bit_scaling(self, tmp_path):
        p = tmp_path / "a.png"
        _write_png_rgb(p, np.array([[[255, 0, 128]]], dtype=np.uint8))
        img = read_rgb(p)
        assert img.data.shape == (1, 1, 3)
        assert img.data[0, 0, 0] == 1.0
        assert img.data[0, 0, 1] == 0.0
        assert img.data[0, 0, 2] == pytest.approx(128 / 255, abs=1e-7)

    def test_16bit_saturation(self, tmp_path):
        p = tmp_path / "a.png"
        _write_png_rgb(p, np.full((2, 2, 3), 65535, dtype=np.uint16))
        img = read_rgb(p)
        assert np.all(img.data == 1.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_rgb(tmp_path / "nope.png")

    def test_not_a_png(self, tmp_path):
        p = tmp_path / "a.png"
        p.write_bytes(b"this is not a png")
        with pytest.raises(FileFormatError, match="not a PNG"):
            read_rgb(p)

    def test_non_rgb_layout(self, tmp_path):
        gray = tmp_path / "gray.png"
        assert cv2.imwrite(str(gray), np.array([[7]], dtype=np.uint8))
        with pytest.raises(FileFormatError, match="channel"):
            read_rgb(gray)
        rgba = tmp_path / "rgba.png"
        assert cv2.imwrite(str(rgba), np.zeros((1, 1, 4), dtype=np.uint8))
        with pytest.raises(FileFormatError, match="channel"):
            read_rgb(rgba)

    def test_values_always_in_unit_range(self, tmp_path, rng):
        for i, dtype in enumerate([np.uint8, np.uint16]):
            maxv = 255 if dtype == np.uint8 else 65535
            arr = rng.integers(0, maxv + 1, size=(5, 4, 3)).astype(dtype)
            p = tmp_path / f"r{i}.png"
            _write_png_rgb(p, arr)
            img = read_rgb(p)
            assert img.data.min() >= 0.0 and img.data.max() <= 1.0
            np.testing.assert_allclose(
                img.data, arr.astype(np.float64) / maxv, atol=1e-7)


class TestReadDepth:
    def test_scale_division(self, tmp_path):
        p = tmp_path / "d.png"
        cv2.imwrite(str(p), np.array([[700]], dtype=np.uint16))
        d = read_depth(p, scale=1000.0)
        assert d.data[0, 0] == pytest.approx(0.7)
        assert d.valid[0, 0]

    def test_zero_is_invalid(self, tmp_path):
        p = tmp_path / "d.png"
        cv2.imwrite(str(p), np.array([[0, 500]], dtype=np.uint16))
        d = read_depth(p)
        assert not d.valid[0, 0]
        assert d.valid[0, 1]

    def test_inclusive_cap(self, tmp_path):
        p = tmp_path / "d.png"
        cv2.imwrite(str(p), np.array([[10000]], dtype=np.uint16))
        d = read_depth(p, scale=1000.0, d_max=10.0)
        assert d.data[0, 0] == pytest.approx(10.0)

    def test_multichannel_rejected(self, tmp_path):
        p = tmp_path / "d.png"
        cv2.imwrite(str(p), np.zeros((2, 2, 3), dtype=np.uint16))
        with pytest.raises(FileFormatError, match="single-channel"):
            read_depth(p)

    def test_missing_and_bad_scale(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_depth(tmp_path / "nope.png")
        p = tmp_path / "d.png"
        cv2.imwrite(str(p), np.array([[1]], dtype=np.uint16))
        with pytest.raises(ValueError):
            read_depth(p, scale=0.0)


class TestWriteMap:
    def test_raw_roundtrip_bit_exact(self, tmp_path, rng):
        for shape in [(1, 1), (7, 3), (4, 5, 2)]:
            data = rng.standard_normal(shape).astype(np.float32)
            p = tmp_path / "m.raw"
            write_map(data, p, format="raw")
            back = read_map(p)
            assert back.dtype == np.float32
            assert back.shape == data.shape
            assert np.array_equal(
                back.view(np.uint32), data.view(np.uint32))  # identical bits

    def test_raw_header_layout(self, tmp_path):
        p = tmp_path / "m.raw"
        write_map(np.array([[1.5, -2.0]], dtype=np.float32), p, format="raw")
        blob = p.read_bytes()
        assert blob[:4] == b"DFD1"
        assert int.from_bytes(blob[4:8], "little") == 2  # width
        assert int.from_bytes(blob[8:12], "little") == 1  # height
        assert np.frombuffer(blob, dtype="<f4", offset=12).tolist() == [1.5, -2.0]

    def test_png16_inverse_of_read_depth(self, tmp_path):
        p = tmp_path / "d.png"
        write_map(np.array([[0.7]], dtype=np.float32), p, format="png16", scale=1000.0)
        raw = cv2.imread(str(p), cv2.IMREAD_UNCHANGED)
        assert raw.dtype == np.uint16 and raw[0, 0] == 700

    def test_png16_range_error(self, tmp_path):
        with pytest.raises(ValueError, match="range"):
            write_map(np.array([[70.0]]), tmp_path / "d.png", format="png16", scale=1000.0)
        with pytest.raises(ValueError, match="range"):
            write_map(np.array([[-0.5]]), tmp_path / "d.png", format="png16", scale=1000.0)

    def test_png16_requires_scale(self, tmp_path):
        with pytest.raises(ValueError, match="scale"):
            write_map(np.array([[0.5]]), tmp_path / "d.png", format="png16")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            write_map(np.array([[0.5]]), tmp_path / "d.bin", format="exr")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            write_map(np.array([[0.5]]), tmp_path / "no" / "dir" / "d.raw", format="raw")

    def test_png16_depth_roundtrip_error_bound(self, tmp_path, rng):
        depth = rng.uniform(0.4, 9.9, size=(8, 6)).astype(np.float32)
        scale = 1000.0
        p = tmp_path / "d.png"
        write_map(depth, p, format="png16", scale=scale)
        back = read_depth(p, scale=scale)
        assert np.abs(back.data - depth).max() <= 0.5 / scale + 1e-7

    def test_read_map_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_map(tmp_path / "nope.raw")
        p = tmp_path / "bad.raw"
        p.write_bytes(b"XXXX\x01\x00\x00\x00\x01\x00\x00\x00")
        with pytest.raises(FileFormatError, match="magic"):
            read_map(p)
        p2 = tmp_path / "trunc.raw"
        p2.write_bytes(b"DFD1" + (2).to_bytes(4, "little") + (2).to_bytes(4, "little") + b"\x00" * 7)
        with pytest.raises(FileFormatError):
            read_map(p2)


class TestWriteRgb:
    def test_roundtrip_16bit(self, tmp_path, rng):
        img = RgbImage(rng.random((4, 5, 3), dtype=np.float32))
        p = tmp_path / "i.png"
        write_rgb(img, p, bit_depth=16)
        back = read_rgb(p)
        assert np.abs(back.data - img.data).max() <= 0.5 / 65535 + 1e-7

    def test_bad_bit_depth(self, tmp_path, rng):
        img = RgbImage(rng.random((2, 2, 3), dtype=np.float32))
        with pytest.raises(ValueError):
            write_rgb(img, tmp_path / "i.png", bit_depth=12)
