"""Core raster types and file I/O shared by the rest of the toolkit.

Conventions used throughout:

* Images and maps are stored row-major with a top-left origin, as float32
  numpy arrays. Color samples are normalized to [0, 1].
* Depth is metric (meters). Kinect-style holes (raw value 0) are carried as
  an explicit boolean validity plane and excluded from every downstream
  statistic; the depth plane itself keeps 0.0 at those pixels as a sentinel.
* All types are treated as immutable after construction; they can be shared
  freely across threads.

On-disk formats: 8/16-bit PNG for input, 16-bit PNG and a raw float32
sidecar for output. PNG cannot represent float data losslessly, so maps that
must round-trip exactly use the raw format: the 4-byte magic ``DFD1``, then
width and height as 32-bit little-endian unsigned integers, then the samples
as row-major 32-bit little-endian floats (channel-interleaved when the map
has more than one channel).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

RAW_MAGIC = b"DFD1"
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class FileFormatError(Exception):
    """Raised when a file exists but its content violates the expected format."""


def _as_float32(data, name, channels=None):
    arr = np.asarray(data, dtype=np.float32)
    if channels is None:
        if arr.ndim != 2:
            raise ValueError(f"{name} data must be 2-D (H, W), got shape {arr.shape}")
    else:
        if arr.ndim != 3 or arr.shape[2] != channels:
            raise ValueError(
                f"{name} data must have shape (H, W, {channels}), got {arr.shape}"
            )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class RgbImage:
    """Color raster with interleaved R, G, B float samples in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_float32(self.data, "RgbImage", channels=3)
        if not np.all(np.isfinite(arr)):
            raise ValueError("RgbImage samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("RgbImage samples must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class ScalarMap:
    """Single-channel float raster (dark channel, blur radii, ...)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_float32(self.data, "ScalarMap")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ScalarMap samples must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class DepthMap:
    """Metric depth in meters with an explicit per-pixel validity plane.

    Valid samples must be finite, strictly positive and at most ``d_max``
    (10 m covers the full working range of typical indoor RGB-D data).
    Invalid pixels (sensor holes) hold 0.0 and are skipped by every consumer
    that reduces over pixels.
    """

    data: np.ndarray
    valid: np.ndarray = None
    d_max: float = 10.0

    def __post_init__(self):
        arr = _as_float32(self.data, "DepthMap")
        if self.valid is None:
            valid = np.ones(arr.shape, dtype=bool)
        else:
            valid = np.asarray(self.valid, dtype=bool)
            if valid.shape != arr.shape:
                raise ValueError(
                    f"validity plane shape {valid.shape} != depth shape {arr.shape}"
                )
        if not np.all(np.isfinite(arr)):
            raise ValueError("DepthMap samples must be finite")
        if not (np.isfinite(self.d_max) and self.d_max > 0):
            raise ValueError(f"d_max must be positive, got {self.d_max}")
        vals = arr[valid]
        if vals.size and vals.min() <= 0.0:
            raise ValueError("valid depth samples must be > 0")
        if vals.size and vals.max() > self.d_max:
            raise ValueError(
                f"depth sample {vals.max():g} m exceeds d_max={self.d_max:g} m"
            )
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "valid", valid)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class CameraParams:
    """Thin-lens constants of the synthetic camera (all lengths in meters).

    Defaults describe a shallow depth-of-field rig: 9 mm focal length, F/2,
    focus plane at 0.7 m, 7.5 um pixel pitch. The aperture diameter is
    derived as focal_length / f_number.
    """

    focal_length: float = 0.009
    f_number: float = 2.0
    focus_distance: float = 0.7
    pixel_pitch: float = 7.5e-6

    def __post_init__(self):
        if not (self.focal_length > 0):
            raise ValueError(f"focal_length must be > 0, got {self.focal_length}")
        if not (self.f_number > 0):
            raise ValueError(f"f_number must be > 0, got {self.f_number}")
        if not (self.pixel_pitch > 0):
            raise ValueError(f"pixel_pitch must be > 0, got {self.pixel_pitch}")
        if not (self.focus_distance > self.focal_length):
            raise ValueError(
                "focus_distance must exceed focal_length "
                f"({self.focus_distance} <= {self.focal_length})"
            )

    @property
    def aperture(self):
        """Aperture diameter in meters, focal_length / f_number."""
        return self.focal_length / self.f_number


def _check_png(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, "rb") as fh:
        head = fh.read(len(_PNG_SIGNATURE))
    if head != _PNG_SIGNATURE:
        raise FileFormatError(f"not a PNG file: {path}")
    return path


def read_rgb(path) -> RgbImage:
    """Read an 8- or 16-bit RGB PNG, scaling samples to [0, 1].

    Scaling divides by the format maximum (255 or 65535). Missing files,
    non-PNG content, unsupported bit depths and non-RGB channel layouts are
    each reported distinctly.
    """
    path = _check_png(path)
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise FileFormatError(f"could not decode PNG: {path}")
    if img.ndim != 3 or img.shape[2] != 3:
        got = 1 if img.ndim == 2 else img.shape[2]
        raise FileFormatError(
            f"expected an RGB layout (3 channels), got {got} channel(s): {path}"
        )
    if img.dtype == np.uint8:
        maxval = 255.0
    elif img.dtype == np.uint16:
        maxval = 65535.0
    else:
        raise FileFormatError(f"unsupported bit depth {img.dtype}: {path}")
    rgb = img[:, :, ::-1].astype(np.float32) / np.float32(maxval)
    return RgbImage(rgb)


def read_depth(path, scale: float = 1000.0, d_max: float = 10.0) -> DepthMap:
    """Read a single-channel 16-bit PNG as metric depth.

    ``scale`` is depth units per meter (1000 for millimeter-encoded maps).
    Raw zeros mark invalid pixels; they are flagged in the validity plane and
    excluded from all downstream statistics.
    """
    if not (scale > 0):
        raise ValueError(f"scale must be > 0, got {scale}")
    path = _check_png(path)
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise FileFormatError(f"could not decode PNG: {path}")
    if img.ndim != 2:
        raise FileFormatError(
            f"expected a single-channel depth PNG, got {img.shape[2]} channels: {path}"
        )
    if img.dtype != np.uint16:
        raise FileFormatError(f"expected 16-bit depth samples, got {img.dtype}: {path}")
    meters = img.astype(np.float32) / np.float32(scale)
    valid = img > 0
    return DepthMap(meters, valid=valid, d_max=d_max)


def write_rgb(img: RgbImage, path, bit_depth: int = 16):
    """Write an RgbImage as an 8- or 16-bit PNG (rounding to nearest)."""
    if bit_depth == 8:
        maxval, dtype = 255.0, np.uint8
    elif bit_depth == 16:
        maxval, dtype = 65535.0, np.uint16
    else:
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    raw = np.rint(img.data.astype(np.float64) * maxval).astype(dtype)
    bgr = raw[:, :, ::-1]
    if not cv2.imwrite(str(path), bgr):
        raise OSError(f"could not write PNG: {path}")


def write_map(m, path, format: str = "raw", scale: float = None):
    """Write a map to disk as ``raw`` (float32 sidecar) or ``png16``.

    ``m`` may be any raster carrying a ``.data`` array (ScalarMap, DepthMap,
    dual-channel cue maps) or a bare 2-D/3-D array. The raw format is
    bit-exact. png16 requires a finite ``scale`` such that every scaled value
    rounds into [0, 65535]; it only supports single-channel maps.
    """
    data = np.asarray(getattr(m, "data", m))
    if data.ndim not in (2, 3):
        raise ValueError(f"map data must be 2-D or 3-D, got shape {data.shape}")
    if format == "raw":
        _write_raw(data, path)
    elif format == "png16":
        if data.ndim != 2:
            raise ValueError("png16 output requires a single-channel map")
        if scale is None or not np.isfinite(scale):
            raise ValueError("png16 output requires a finite scale")
        scaled = np.rint(data.astype(np.float64) * scale)
        if scaled.min() < 0 or scaled.max() > 65535:
            raise ValueError(
                f"scaled values span [{scaled.min():g}, {scaled.max():g}], "
                "outside the png16 range [0, 65535]"
            )
        if not cv2.imwrite(str(path), scaled.astype(np.uint16)):
            raise OSError(f"could not write PNG: {path}")
    else:
        raise ValueError(f"unknown format {format!r} (expected 'raw' or 'png16')")


def _write_raw(data, path):
    data = np.ascontiguousarray(data, dtype="<f4")
    h, w = data.shape[0], data.shape[1]
    header = RAW_MAGIC + struct.pack("<II", w, h)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_map(path) -> np.ndarray:
    """Read a raw float32 sidecar written by :func:`write_map`.

    Returns a float32 array of shape (H, W) or (H, W, C); the channel count
    is inferred from the payload size.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:4] != RAW_MAGIC:
        raise FileFormatError(f"missing {RAW_MAGIC!r} magic: {path}")
    w, h = struct.unpack("<II", blob[4:12])
    if w < 1 or h < 1:
        raise FileFormatError(f"invalid dimensions {w}x{h}: {path}")
    payload = len(blob) - 12
    if payload % (4 * w * h) != 0:
        raise FileFormatError(f"payload size {payload} not a multiple of 4*{w}*{h}: {path}")
    channels = payload // (4 * w * h)
    if channels < 1:
        raise FileFormatError(f"empty payload: {path}")
    flat = np.frombuffer(blob, dtype="<f4", offset=12)
    if channels == 1:
        return flat.reshape(h, w).copy()
    return flat.reshape(h, w, channels).copy()
