"""Local variation cues for defocus analysis.

The dual-channel cue map pairs, per pixel, the maximum absolute intensity
deviation within the 3x3 neighborhood of

* channel 0: the dark channel (local dark channel variation, LDCV), and
* channel 1: the color image itself (local defocus variation, LDV), where
  the absolute difference is taken per color channel and the maximum runs
  over neighbors and channels.

Strongly defocused regions are locally homogenized, so both channels drop
there; in-focus regions keep higher values. ``blur_cue_profile`` turns that
relationship into a per-blur-level table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import RgbImage, ScalarMap

DEFAULT_THRESHOLD = 0.05

_NEIGHBOR_OFFSETS = [
    (di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)
]


@dataclass(frozen=True)
class LddcvMap:
    """Dual-channel cue map: channel 0 = LDCV (dark-channel based), channel 1 = LDV (image based)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"cue map must have shape (H, W, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("cue map samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("cue map samples must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def ldcv(self):
        return self.data[:, :, 0]

    @property
    def ldv(self):
        return self.data[:, :, 1]


@dataclass(frozen=True)
class ValidityMask:
    """Binary mask: 1 where the channel-maximum cue strictly exceeds the threshold."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        if arr.max(initial=0) > 1:
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


def _max_abs_neighbor_diff(plane):
    """Max |center - neighbor| over the in-bounds 3x3 neighborhood.

    Works on (H, W) or (H, W, C) input; for multi-channel input the maximum
    also runs over channels. The center itself contributes zero and is
    therefore irrelevant to the max.
    """
    h, w = plane.shape[0], plane.shape[1]
    out = np.zeros((h, w), dtype=np.float64)
    p = plane.astype(np.float64)
    for di, dj in _NEIGHBOR_OFFSETS:
        ci0, ci1 = max(0, -di), h - max(0, di)
        cj0, cj1 = max(0, -dj), w - max(0, dj)
        if ci0 >= ci1 or cj0 >= cj1:
            continue
        center = p[ci0:ci1, cj0:cj1]
        neighbor = p[ci0 + di:ci1 + di, cj0 + dj:cj1 + dj]
        diff = np.abs(center - neighbor)
        if diff.ndim == 3:
            diff = diff.max(axis=2)
        np.maximum(out[ci0:ci1, cj0:cj1], diff, out=out[ci0:ci1, cj0:cj1])
    return out


def lddcv(dark: ScalarMap, img: RgbImage) -> LddcvMap:
    """Build the dual-channel cue map from a dark channel and its source image.

    Both inputs must share dimensions. A 1x1 input has no neighbors, so both
    channels are zero there.
    """
    if (dark.height, dark.width) != (img.height, img.width):
        raise ValueError(
            f"dimension mismatch: dark {dark.height}x{dark.width} "
            f"vs image {img.height}x{img.width}"
        )
    ldcv = _max_abs_neighbor_diff(dark.data)
    ldv = _max_abs_neighbor_diff(img.data)
    return LddcvMap(np.stack([ldcv, ldv], axis=2))


def validity_mask(cues: LddcvMap, threshold: float = DEFAULT_THRESHOLD) -> ValidityMask:
    """Mark pixels whose channel-maximum cue strictly exceeds ``threshold``.

    The threshold must satisfy 0 <= threshold < 1; the comparison is strict,
    so a cue exactly equal to the threshold stays masked out.
    """
    if not (0.0 <= threshold < 1.0):
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")
    peak = cues.data.max(axis=2)
    return ValidityMask((peak > threshold).astype(np.uint8))


@dataclass(frozen=True)
class ProfileBin:
    """One row of a blur/cue profile; means are NaN when the bin is empty."""

    center: float
    mean_ldcv: float
    mean_ldv: float
    count: int


def blur_cue_profile(cues: LddcvMap, radii: ScalarMap, n_bins: int = 20):
    """Mean cue levels per normalized-blur bin.

    Radii are normalized by their maximum; pixels are then partitioned into
    ``n_bins`` equal-width bins of normalized blur and each bin reports
    (bin center, mean LDCV, mean LDV, pixel count). Empty bins carry count 0
    with NaN means. If every radius is zero the normalization is degenerate
    and a single bin at blur level 0 holds the global means.
    """
    if (cues.height, cues.width) != (radii.height, radii.width):
        raise ValueError(
            f"dimension mismatch: cues {cues.height}x{cues.width} "
            f"vs radii {radii.height}x{radii.width}"
        )
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    r = radii.data.astype(np.float64)
    if r.min() < 0.0:
        raise ValueError("radii must be >= 0")
    ldcv = cues.data[:, :, 0].astype(np.float64).ravel()
    ldv = cues.data[:, :, 1].astype(np.float64).ravel()
    rmax = r.max()
    if rmax == 0.0:
        return [ProfileBin(0.0, float(ldcv.mean()), float(ldv.mean()), ldcv.size)]
    idx = np.minimum((r.ravel() / rmax * n_bins).astype(np.int64), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sum_ldcv = np.bincount(idx, weights=ldcv, minlength=n_bins)
    sum_ldv = np.bincount(idx, weights=ldv, minlength=n_bins)
    rows = []
    for k in range(n_bins):
        c = int(counts[k])
        mean_ldcv = float(sum_ldcv[k] / c) if c else float("nan")
        mean_ldv = float(sum_ldv[k] / c) if c else float("nan")
        rows.append(ProfileBin((k + 0.5) / n_bins, mean_ldcv, mean_ldv, c))
    return rows
