"""gmq: anisotropic 3D Gaussian mixtures under exact perspective projection.

The library represents objects as mixtures of unnormalized 3D Gaussians,
projects them analytically to 2D ellipses, fits them to binary silhouette
masks by gradient descent, and serves an interactive posing API.
"""

from . import datagen, errors, gauss, metrics, raster
from .gauss import Camera, Gaussian2, Gaussian3, PoseTransform

__version__ = "0.1.0"

__all__ = [
    "Camera",
    "Gaussian2",
    "Gaussian3",
    "PoseTransform",
    "datagen",
    "errors",
    "gauss",
    "metrics",
    "raster",
]
