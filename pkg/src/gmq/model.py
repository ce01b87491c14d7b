"""Fitted-model container and pose rendering shared by the CLI and service."""

from dataclasses import dataclass, field

import numpy as np

from .errors import BehindCamera, CameraInsideGaussian, NotAnEllipse
from .gauss.projection import project
from .gauss.transforms import compose_transform, eig_factor
from .gauss.types import Camera, Gaussian3, PoseTransform
from .raster import GaussianMaps, rasterize_maps


@dataclass(frozen=True)
class CanonicalGaussian:
    """One canonical Gaussian plus (optionally) the raws that built it."""

    gaussian: Gaussian3
    raw: dict | None = None


@dataclass(frozen=True)
class ImagePose:
    """Per-image yaw and per-Gaussian transforms recovered by a fit."""

    id: str
    yaw: float
    transforms: tuple


@dataclass(frozen=True)
class Model:
    """Canonical Gaussians, camera, and per-image poses."""

    parameterization: str
    camera: Camera
    canonical: tuple
    images: tuple = field(default_factory=tuple)

    @property
    def k(self):
        return len(self.canonical)

    def pose_for(self, image_id):
        for im in self.images:
            if im.id == image_id:
                return im
        return None


def identity_transforms(k):
    return tuple(PoseTransform.identity() for _ in range(k))


def instantiate(model: Model, yaw=0.0, transforms=None):
    """Per-image Gaussians from the canonical set, a yaw, and transforms."""
    if transforms is None:
        transforms = identity_transforms(model.k)
    if len(transforms) != model.k:
        raise ValueError(f"expected {model.k} transforms, got {len(transforms)}")
    out = []
    for entry, tf in zip(model.canonical, transforms):
        full = PoseTransform(s=tf.s, t=tf.t, theta=tf.theta, yaw=yaw)
        out.append(compose_transform(entry.gaussian, full, factor=eig_factor(entry.gaussian)))
    return out


def project_all(gaussians, cam: Camera):
    """Project every Gaussian, mapping failures to None instead of raising."""
    out = []
    for g in gaussians:
        try:
            out.append(project(g, cam))
        except (BehindCamera, CameraInsideGaussian, NotAnEllipse):
            out.append(None)
    return out


def render_pose(model: Model, yaw=0.0, transforms=None, resolution=None):
    """Compose, project, and rasterize the model at one pose.

    Returns (maps, projected) where projected[k] is a Gaussian2 or None.
    Resolution overrides rescale the intrinsics so the field of view is
    preserved.
    """
    cam = model.camera
    if resolution is not None and resolution != (cam.width, cam.height):
        w, h = resolution
        sx, sy = w / cam.width, h / cam.height
        cam = Camera(
            fx=cam.fx * sx,
            fy=cam.fy * sy,
            skew=cam.skew * sx,
            cx=cam.cx * sx,
            cy=cam.cy * sy,
            width=w,
            height=h,
            rot=cam.rot,
            pos=cam.pos,
        )
    gaussians = instantiate(model, yaw=yaw, transforms=transforms)
    projected = project_all(gaussians, cam)
    maps = rasterize_maps(projected, cam.width, cam.height)
    return maps, projected


def grid_to_png_bytes(grid):
    """Encode a [0, 1]-clipped grid as 8-bit grayscale PNG bytes."""
    import io

    from PIL import Image

    data = np.rint(np.clip(grid, 0.0, 1.0) * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(data, mode="L").save(buf, format="PNG")
    return buf.getvalue()
