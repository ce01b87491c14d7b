"""Exact analytic silhouettes of ellipsoid scenes.

Each pixel is foreground iff the ray through its center hits any
(yaw-rotated) ellipsoid with a positive-depth intersection; no sampling or
shading is involved, so rendered masks are exact ground truth.
"""

import numpy as np

from ..gauss.transforms import yaw_matrix
from ..gauss.types import Camera
from ..raster import MaskImage
from .scenes import SceneSpec


def ray_grid(cam: Camera):
    """World-space ray directions through every pixel center.

    Returns (origin, dirs) with dirs of shape (H, W, 3); directions are
    unnormalized (z = 1 in the camera frame).
    """
    u = np.arange(cam.width) + 0.5
    v = np.arange(cam.height) + 0.5
    y_t = (v - cam.cy) / cam.fy
    x_t = (u[None, :] - cam.cx - cam.skew * y_t[:, None]) / cam.fx
    dirs_cam = np.stack(
        [x_t, np.broadcast_to(y_t[:, None], x_t.shape), np.ones_like(x_t)], axis=-1
    )
    return cam.pos, dirs_cam @ cam.rot  # rot^T applied to each direction


def render_gt_mask(scene: SceneSpec, yaw, cam: Camera) -> MaskImage:
    """Binary silhouette of the scene rotated by `yaw` about world +y."""
    origin, dirs = ray_grid(cam)
    r = yaw_matrix(yaw)
    hit = np.zeros(dirs.shape[:2], dtype=bool)
    for e in scene.ellipsoids:
        center = r @ e.center
        shape = r @ e.shape @ r.T
        a_mat = np.linalg.inv(shape)
        m = origin - center
        a = np.einsum("hwi,ij,hwj->hw", dirs, a_mat, dirs)
        b = np.einsum("hwi,ij,j->hw", dirs, a_mat, m)
        c = m @ a_mat @ m - 1.0
        disc = b * b - a * c
        root = np.sqrt(np.maximum(disc, 0.0))
        hit |= (disc >= 0.0) & ((-b + root) > 0.0)
    return MaskImage(data=hit.astype(np.float64))
