"""Gaussian kernel density estimation with Silverman's bandwidth rule.

One-dimensional only; the data can be anything scalar (depth values, blur
levels, ...). Silverman's rule of thumb for Gaussian kernels is
h = (4 * sigma^5 / (3 n))^(1/5) with sigma the sample standard deviation
(n - 1 denominator); no IQR robustification is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GRID_POINTS = 512
_GRID_SPAN_BANDWIDTHS = 3.0
_CHUNK = 65536  # samples per accumulation block; keeps grid x sample memory bounded


@dataclass(frozen=True)
class KdeResult:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        d = np.asarray(self.density, dtype=np.float64)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("grid must be a nonempty 1-D array")
        if d.shape != g.shape:
            raise ValueError("density and grid shapes must match")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if d.min() < 0:
            raise ValueError("density must be nonnegative")
        if not (self.bandwidth > 0):
            raise ValueError("bandwidth must be > 0")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "density", d)


def silverman_bandwidth(samples) -> float:
    """Plug-in bandwidth (4 sigma^5 / (3 n))^(1/5) for a Gaussian kernel."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError(f"need at least 2 samples, got {x.size}")
    sigma = x.std(ddof=1)
    if sigma <= 0:
        raise ValueError("sample standard deviation must be > 0")
    return float((4.0 * sigma**5 / (3.0 * x.size)) ** 0.2)


def gaussian_kde(samples, grid=None, bandwidth: float = None) -> KdeResult:
    """Evaluate a Gaussian kernel density estimate on a grid.

    density(g) = (1 / (n h sqrt(2 pi))) * sum_i exp(-(g - x_i)^2 / (2 h^2))

    ``bandwidth`` defaults to Silverman's rule; ``grid`` defaults to 512
    evenly spaced points spanning [min - 3h, max + 3h].
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("need at least 1 sample")
    if bandwidth is None:
        bandwidth = silverman_bandwidth(x)
    if not (bandwidth > 0):
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    h = float(bandwidth)
    if grid is None:
        grid = np.linspace(
            x.min() - _GRID_SPAN_BANDWIDTHS * h,
            x.max() + _GRID_SPAN_BANDWIDTHS * h,
            DEFAULT_GRID_POINTS,
        )
    g = np.asarray(grid, dtype=np.float64).ravel()
    if g.size == 0:
        raise ValueError("grid must be nonempty")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")

    acc = np.zeros(g.size, dtype=np.float64)
    for start in range(0, x.size, _CHUNK):
        block = x[start:start + _CHUNK]
        z = (g[:, None] - block[None, :]) / h
        acc += np.exp(-0.5 * z * z).sum(axis=1)
    density = acc / (x.size * h * math.sqrt(2.0 * math.pi))
    return KdeResult(grid=g, density=density, bandwidth=h)
