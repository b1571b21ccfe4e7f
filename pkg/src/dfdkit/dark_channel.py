"""Dark channel: per-pixel minimum over color channels and a local window.

Sharp, well-focused regions keep high local contrast and therefore deep
(dark) minima; defocused regions are smoothed and their minima rise. That
makes the dark channel a cheap per-pixel blur cue.
"""

from __future__ import annotations

import scipy.ndimage as ndi

from .raster import RgbImage, ScalarMap


def dark_channel(img: RgbImage, window: int = 15) -> ScalarMap:
    """Minimum of all three channels over a window x window neighborhood.

    The window is clipped to the image bounds, so border pixels take the
    minimum over the in-bounds part of their neighborhood only. ``window``
    must be odd and >= 1; values larger than the image extent are fine (the
    clipping handles them). The default of 15 is the classic choice for
    dark-channel work.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 1, got {window}")
    channel_min = img.data.min(axis=2)
    # Replicated-edge padding never introduces values outside the clipped
    # window, so 'nearest' reproduces the clipped minimum exactly.
    pooled = ndi.minimum_filter(channel_min, size=window, mode="nearest")
    return ScalarMap(pooled)
