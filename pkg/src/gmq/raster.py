"""Sampling projected Gaussians onto pixel grids and the silhouette loss.

Pixel convention: the value for image row i, column j is taken at the
pixel center (j + 0.5, i + 0.5), with the origin at the top-left corner.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .gauss.types import Gaussian2


@dataclass(frozen=True)
class MaskImage:
    """H x W grid of values in [0, 1]; row 0 is the top image row."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("mask must be a non-empty 2D grid")
        if a.min() < 0.0 or a.max() > 1.0:
            raise ValueError("mask values must lie in [0, 1]")
        object.__setattr__(self, "data", a)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class GaussianMaps:
    """K density maps sharing one pixel grid; failed projections are zero."""

    maps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.maps, dtype=np.float64)
        if a.ndim != 3:
            raise ValueError("maps must have shape (K, H, W)")
        object.__setattr__(self, "maps", a)

    @property
    def k(self):
        return self.maps.shape[0]

    @property
    def shape(self):
        return self.maps.shape[1:]


def eval_density2(g: Gaussian2, p):
    """exp(-(p - mu)^T cov^{-1} (p - mu)) at pixel coordinates p."""
    d = np.asarray(p, dtype=np.float64) - g.mu_px
    q = d @ np.linalg.solve(g.cov_px, d)
    return float(np.exp(-q))


def _density_grid(g: Gaussian2, width, height):
    # Quadratic form coefficients from the 2x2 inverse covariance; the
    # form is separable in row/column offsets so only 1-D arrays are built
    # before the final H x W combination.
    c = g.cov_px
    det = c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0]
    a = c[1, 1] / det
    b = -c[0, 1] / det
    cc = c[0, 0] / det
    dx = (np.arange(width) + 0.5) - g.mu_px[0]
    dy = (np.arange(height) + 0.5) - g.mu_px[1]
    q = (a * dx * dx)[None, :] + (cc * dy * dy)[:, None] + 2.0 * b * np.outer(dy, dx)
    return np.exp(-np.minimum(q, 700.0))


def rasterize_maps(gs, width, height) -> GaussianMaps:
    """Sample each projected Gaussian on the grid; None entries give zeros.

    K = len(gs); entries may be Gaussian2 instances or None for Gaussians
    whose projection failed.
    """
    maps = np.zeros((len(gs), height, width))
    for k, g in enumerate(gs):
        if g is not None:
            maps[k] = _density_grid(g, width, height)
    return GaussianMaps(maps=maps)


def sum_map(maps: GaussianMaps):
    """Pointwise sum over the K maps. Deliberately not clamped to [0, 1]."""
    if maps.k == 0:
        return np.zeros(maps.shape)
    return maps.maps.sum(axis=0)


def _grid_of(m):
    return m.data if isinstance(m, MaskImage) else np.asarray(m, dtype=np.float64)


def density_loss(mask, maps: GaussianMaps):
    """Mean absolute difference between the mask and the summed maps.

    The mean (rather than sum) reduction keeps loss magnitudes comparable
    across resolutions.
    """
    m = _grid_of(mask)
    if maps.maps.shape[1:] != m.shape:
        raise DimensionMismatch(f"mask {m.shape} vs maps {maps.maps.shape[1:]}")
    return float(np.mean(np.abs(m - sum_map(maps))))


def coarse_silhouette(maps: GaussianMaps, tau=0.5) -> MaskImage:
    """Binary mask where the summed density reaches tau (default 0.5)."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    return MaskImage(data=(sum_map(maps) >= tau).astype(np.float64))
