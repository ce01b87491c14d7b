"""Unnormalized Gaussian density evaluation."""

import numpy as np

from .types import Gaussian2, Gaussian3


def eval_density3(g: Gaussian3, x):
    """exp(-(x - mu)^T cov^{-1} (x - mu)); equals 1 only at the mean."""
    d = np.asarray(x, dtype=np.float64) - g.mu
    q = d @ np.linalg.solve(g.cov, d)
    return float(np.exp(-q))


def eval_density2(g: Gaussian2, p):
    """2D counterpart of eval_density3, in pixel coordinates."""
    d = np.asarray(p, dtype=np.float64) - g.mu_px
    q = d @ np.linalg.solve(g.cov_px, d)
    return float(np.exp(-q))
