"""Silhouette agreement metrics: IoU and structural dissimilarity."""

import numpy as np

from .errors import DimensionMismatch, TooSmall
from .raster import MaskImage

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_RANGE = 1.0


def _grid_of(m):
    return m.data if isinstance(m, MaskImage) else np.asarray(m, dtype=np.float64)


def iou(a, b):
    """Intersection over union of masks binarized at 0.5.

    Two empty masks agree perfectly and score 1.
    """
    ga, gb = _grid_of(a), _grid_of(b)
    if ga.shape != gb.shape:
        raise DimensionMismatch(f"{ga.shape} vs {gb.shape}")
    fa, fb = ga >= 0.5, gb >= 0.5
    union = np.logical_or(fa, fb).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(fa, fb).sum() / union)


def _gaussian_kernel(size, sigma):
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


def _windowed_mean(img, kernel):
    # Valid-region correlation via sliding windows; border rows/columns
    # within the window radius never enter the statistics.
    size = kernel.shape[0]
    windows = np.lib.stride_tricks.sliding_window_view(img, (size, size))
    return np.einsum("ijkl,kl->ij", windows, kernel)


def ssim(a, b):
    """Mean Gaussian-weighted SSIM with the standard constants.

    Unit dynamic range, 11x11 window with sigma 1.5, weighted (biased)
    second moments, statistics restricted to fully-interior windows.
    """
    ga, gb = _grid_of(a), _grid_of(b)
    if ga.shape != gb.shape:
        raise DimensionMismatch(f"{ga.shape} vs {gb.shape}")
    if min(ga.shape) < SSIM_WIN:
        raise TooSmall(f"need at least {SSIM_WIN}x{SSIM_WIN}, got {ga.shape}")
    kernel = _gaussian_kernel(SSIM_WIN, SSIM_SIGMA)
    mu_a = _windowed_mean(ga, kernel)
    mu_b = _windowed_mean(gb, kernel)
    var_a = _windowed_mean(ga * ga, kernel) - mu_a * mu_a
    var_b = _windowed_mean(gb * gb, kernel) - mu_b * mu_b
    cov_ab = _windowed_mean(ga * gb, kernel) - mu_a * mu_b
    c1 = (SSIM_K1 * SSIM_RANGE) ** 2
    c2 = (SSIM_K2 * SSIM_RANGE) ** 2
    s = ((2 * mu_a * mu_b + c1) * (2 * cov_ab + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    return float(s.mean())


def dssim(a, b):
    """Structural dissimilarity (1 - SSIM) / 2, in [0, 1]."""
    return (1.0 - ssim(a, b)) / 2.0
