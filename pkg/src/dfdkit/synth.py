"""Depth-dependent defocus synthesis from an RGB-D pair via the thin-lens model.

The blur radius at a pixel follows the thin-lens geometry: zero at the
in-focus plane, growing as the scene point moves away from it, and bounded
above by the depth-independent prefactor

    aperture * focal_length / (focus_distance - focal_length) / (sqrt(2) * pixel_pitch)

which it approaches as depth goes to infinity. The blur itself is an
isotropic Gaussian whose standard deviation is that radius in pixels.

The spatially varying convolution is a per-pixel *gather*: each output pixel
averages input pixels under the kernel selected by its own blur radius. This
is the standard choice for synthetic defocus datasets; it is deterministic
and parallel but ignores occlusion-aware scattering at depth discontinuities.
At the image border the kernel is renormalized over in-bounds taps, so no
synthetic padding values are invented.
"""

from __future__ import annotations

import math

import cv2
import numpy as np

from .raster import CameraParams, DepthMap, RgbImage, ScalarMap

#: Below this radius (pixels) the Gaussian degenerates; the kernel is identity.
MIN_RADIUS = 0.25
#: Radii are quantized to this step when building the kernel cache.
RADIUS_QUANT = 1.0 / 64.0


def blur_radius(depth: DepthMap, cam: CameraParams) -> ScalarMap:
    """Per-pixel thin-lens blur radius in pixels.

    r = aperture * f / (focus - f) * |d - focus| / d / (sqrt(2) * pixel_pitch)

    Invalid depth pixels get radius 0 (treated as in-focus); they carry no
    usable depth, and downstream statistics exclude them anyway.
    """
    d = depth.data.astype(np.float64)
    if np.any(d[depth.valid] <= 0.0):
        raise ValueError("blur_radius requires strictly positive depths")
    prefactor = (
        cam.aperture
        * cam.focal_length
        / (cam.focus_distance - cam.focal_length)
        / (math.sqrt(2.0) * cam.pixel_pitch)
    )
    # Depth is stored float32; quantize the focus constant the same way so
    # pixels at the focus plane get exactly zero radius.
    focus = float(np.float32(cam.focus_distance))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = prefactor * np.abs(d - focus) / d
    r = np.where(depth.valid, r, 0.0)
    return ScalarMap(r)


def quantize_radius(r: float) -> float:
    """Snap a radius to the kernel-cache grid (steps of 1/64 px)."""
    return round(r / RADIUS_QUANT) * RADIUS_QUANT


def gaussian_psf(radius: float, truncation: float = 3.0) -> np.ndarray:
    """Square Gaussian kernel for one blur radius, normalized to sum to 1.

    Radii below ``MIN_RADIUS`` yield the 1x1 identity kernel. Otherwise the
    half-width is ceil(truncation * radius), giving an odd side of
    2*half-width + 1; weights follow exp(-(x^2 + y^2) / (2 r^2)) and are
    renormalized, so the <0.4% of mass lost to truncation at the default
    setting is folded back in.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if not (truncation > 0):
        raise ValueError(f"truncation must be > 0, got {truncation}")
    if radius < MIN_RADIUS:
        return np.ones((1, 1), dtype=np.float64)
    half = int(math.ceil(truncation * radius))
    x = np.arange(-half, half + 1, dtype=np.float64)
    sq = x[:, None] ** 2 + x[None, :] ** 2
    kernel = np.exp(-sq / (2.0 * radius * radius))
    return kernel / kernel.sum()


def _filter_zero_pad(arr, kernel):
    """True convolution with zero padding (cv2.filter2D correlates, so flip)."""
    flipped = np.ascontiguousarray(kernel[::-1, ::-1])
    return cv2.filter2D(arr, -1, flipped, borderType=cv2.BORDER_CONSTANT)


def synthesize_defocus(
    img: RgbImage,
    depth: DepthMap,
    cam: CameraParams,
    truncation: float = 3.0,
) -> RgbImage:
    """Apply depth-dependent Gaussian defocus to an image.

    Gather semantics: the kernel at each output pixel is chosen from that
    pixel's blur radius (quantized to 1/64 px so kernels can be shared).
    Borders renormalize the kernel over in-bounds taps. Depth equal to the
    focus distance reproduces the input bit-exactly.
    """
    if (img.height, img.width) != (depth.height, depth.width):
        raise ValueError(
            f"dimension mismatch: image {img.height}x{img.width} "
            f"vs depth {depth.height}x{depth.width}"
        )
    radii = blur_radius(depth, cam).data.astype(np.float64)
    keys = np.rint(radii / RADIUS_QUANT).astype(np.int64)
    identity = (keys * RADIUS_QUANT) < MIN_RADIUS

    out = img.data.astype(np.float64)  # identity pixels keep the input
    src = img.data.astype(np.float64)
    h, w = depth.height, depth.width

    for key in np.unique(keys[~identity]):
        kernel = gaussian_psf(key * RADIUS_QUANT, truncation)
        half = kernel.shape[0] // 2
        mask = keys == key
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        # Expand the bounding box by the kernel half-width so the crop sees
        # every tap; taps beyond the true image edge stay zero-padded, which
        # the in-bounds renormalization below accounts for.
        r0, r1 = max(0, rows[0] - half), min(h, rows[-1] + 1 + half)
        c0, c1 = max(0, cols[0] - half), min(w, cols[-1] + 1 + half)
        crop = np.ascontiguousarray(src[r0:r1, c0:c1])
        num = _filter_zero_pad(crop, kernel)
        den = _filter_zero_pad(np.ones(crop.shape[:2], dtype=np.float64), kernel)
        blurred = num / den[:, :, None]
        local = mask[r0:r1, c0:c1]
        out[r0:r1, c0:c1][local] = blurred[local]

    return RgbImage(np.clip(out, 0.0, 1.0).astype(np.float32))
