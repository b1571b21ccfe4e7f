"""Standard depth-estimation error metrics.

The seven usual quantities: absolute relative error, squared relative error,
RMSE, log-RMSE (natural log), and the three thresholded accuracies delta_i
(fraction of pixels with max(pred/gt, gt/pred) strictly below 1.25^i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import DepthMap


@dataclass(frozen=True)
class MetricsReport:
    abs_rel: float
    sq_rel: float
    rmse: float
    log_rmse: float
    delta1: float
    delta2: float
    delta3: float
    n_pixels: int

    def as_dict(self):
        return {
            "abs_rel": self.abs_rel,
            "sq_rel": self.sq_rel,
            "rmse": self.rmse,
            "log_rmse": self.log_rmse,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta3": self.delta3,
            "n_pixels": self.n_pixels,
        }


def evaluate(pred: DepthMap, gt: DepthMap, valid=None, cap: float = 10.0) -> MetricsReport:
    """Evaluate predicted against ground-truth depth over valid pixels.

    Pixels are included when they are valid in both maps and the ground
    truth does not exceed ``cap`` (inclusive; 10 m covers the full range of
    typical indoor data). Raises if no pixel survives or if any included
    depth is nonpositive.
    """
    if pred.data.shape != gt.data.shape:
        raise ValueError(
            f"dimension mismatch: pred {pred.data.shape} vs gt {gt.data.shape}"
        )
    if valid is None:
        flags = pred.valid & gt.valid
    else:
        flags = np.asarray(valid, dtype=bool)
        if flags.shape != gt.data.shape:
            raise ValueError(f"validity shape {flags.shape} != depth shape {gt.data.shape}")
    g64 = gt.data.astype(np.float64)
    flags = flags & (g64 <= cap)
    n = int(flags.sum())
    if n == 0:
        raise ValueError("no valid pixels after capping")
    p = pred.data.astype(np.float64)[flags]
    g = g64[flags]
    if p.min() <= 0 or g.min() <= 0:
        raise ValueError("depth values must be > 0 on evaluated pixels")

    thresh = np.maximum(g / p, p / g)
    delta1 = float((thresh < 1.25).mean())
    delta2 = float((thresh < 1.25**2).mean())
    delta3 = float((thresh < 1.25**3).mean())

    err = p - g
    abs_rel = float(np.mean(np.abs(err) / g))
    sq_rel = float(np.mean(err**2 / g))
    rmse = float(np.sqrt(np.mean(err**2)))
    log_rmse = float(np.sqrt(np.mean((np.log(p) - np.log(g)) ** 2)))

    return MetricsReport(abs_rel, sq_rel, rmse, log_rmse, delta1, delta2, delta3, n)
