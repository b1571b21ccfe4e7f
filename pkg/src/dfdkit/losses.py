"""Depth regression loss terms and their weighted combination.

Three terms: a spatial fidelity loss (mean absolute depth error over valid
pixels), a frequency-domain loss (mean absolute difference of 2-D cosine
spectra), and a generator-side least-squares adversarial loss computed from
externally supplied discriminator scores. The combined value weights the
frequency and adversarial terms by 0.1 each.

Both pixel losses use means rather than sums so values are comparable across
image sizes and the combination weights keep their meaning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .raster import DepthMap

W_FREQ = 0.1
W_ADV = 0.1


@dataclass(frozen=True)
class LossReport:
    """Loss components; l_adv is None when no discriminator scores were supplied."""

    l_spafid: float
    l_freq: float
    l_total: float
    l_adv: float = None
    w_freq: float = W_FREQ
    w_adv: float = W_ADV

    def as_dict(self):
        out = {"l_spafid": self.l_spafid, "l_freq": self.l_freq}
        if self.l_adv is not None:
            out["l_adv"] = self.l_adv
        out["l_total"] = self.l_total
        out["w_freq"] = self.w_freq
        out["w_adv"] = self.w_adv
        return out


def _plane(m):
    return np.asarray(getattr(m, "data", m), dtype=np.float64)


def _combined_valid(d, d_gt, valid):
    if valid is not None:
        return np.asarray(valid, dtype=bool)
    flags = np.ones(_plane(d).shape, dtype=bool)
    for m in (d, d_gt):
        v = getattr(m, "valid", None)
        if v is not None:
            flags &= v
    return flags


def spatial_fidelity(d: DepthMap, d_gt: DepthMap, valid=None) -> float:
    """Mean absolute depth error over valid pixels.

    ``valid`` defaults to the AND of both maps' validity planes.
    """
    a, b = _plane(d), _plane(d_gt)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    flags = _combined_valid(d, d_gt, valid)
    if flags.shape != a.shape:
        raise ValueError(f"validity shape {flags.shape} != depth shape {a.shape}")
    n = int(flags.sum())
    if n == 0:
        raise ValueError("no valid pixels")
    return float(np.abs(a[flags] - b[flags]).mean())


def dct2(m) -> np.ndarray:
    """Separable 2-D unnormalized DCT-II, rows then columns.

    Per axis the transform is x_k = sum_i x_i * cos[(pi/L) * (i + 1/2) * k];
    a constant map therefore concentrates everything in the (0, 0)
    coefficient with value c * H * W. Returns float64 coefficients with the
    input's shape.
    """
    x = _plane(m)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D map, got shape {x.shape}")
    # scipy's unnormalized DCT-II is 2x this definition per axis.
    return scipy.fft.dctn(x, type=2) / 4.0


def idct2(coeff) -> np.ndarray:
    """Inverse of :func:`dct2` (exact up to float rounding)."""
    c = np.asarray(coeff, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError(f"expected a 2-D coefficient map, got shape {c.shape}")
    # scipy's idctn already carries the 1/(2N) factors per axis.
    return scipy.fft.idctn(c * 4.0, type=2)


def frequency_loss(d: DepthMap, d_gt: DepthMap) -> float:
    """Mean absolute difference between the cosine spectra of two maps."""
    a, b = _plane(d), _plane(d_gt)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(dct2(a) - dct2(b)).mean())


def adversarial_loss_g(scores) -> float:
    """Generator-side least-squares adversarial loss: 0.5 * mean((s - 1)^2)."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("at least one discriminator score is required")
    return float(0.5 * np.mean((s - 1.0) ** 2))


def total_loss(l_spafid: float, l_freq: float, l_adv: float = None) -> LossReport:
    """Combine loss terms: l_spafid + 0.1 * l_freq + 0.1 * l_adv.

    A missing adversarial term contributes zero (evaluation without a
    discriminator).
    """
    components = [l_spafid, l_freq] + ([] if l_adv is None else [l_adv])
    for c in components:
        if not np.isfinite(c) or c < 0:
            raise ValueError(f"loss components must be finite and >= 0, got {c}")
    total = l_spafid + W_FREQ * l_freq + W_ADV * (0.0 if l_adv is None else l_adv)
    return LossReport(
        l_spafid=float(l_spafid),
        l_freq=float(l_freq),
        l_total=float(total),
        l_adv=None if l_adv is None else float(l_adv),
    )
