"""Known ellipsoid scenes used as recovery ground truth."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Ellipsoid:
    """Solid ellipsoid (x - center)^T shape^{-1} (x - center) <= 1."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        q = np.asarray(self.shape, dtype=np.float64)
        if c.shape != (3,) or q.shape != (3, 3):
            raise ValueError("ellipsoid needs a 3-vector center and 3x3 shape")
        if np.max(np.abs(q - q.T)) > 1e-10:
            raise ValueError("shape matrix must be symmetric")
        if np.linalg.eigvalsh(q).min() <= 0:
            raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", q)


@dataclass(frozen=True)
class SceneSpec:
    name: str
    ellipsoids: tuple

    def __post_init__(self):
        parts = tuple(
            e if isinstance(e, Ellipsoid) else Ellipsoid(*e) for e in self.ellipsoids
        )
        for e in parts:
            reach = np.abs(e.center) + np.sqrt(np.linalg.eigvalsh(e.shape).max())
            if np.any(reach > 1.0):
                raise ValueError(f"scene '{self.name}' leaves [-1, 1]^3")
        object.__setattr__(self, "ellipsoids", parts)

    @property
    def centers(self):
        return np.stack([e.center for e in self.ellipsoids])


def _frame_along(direction):
    """Rotation whose middle column is `direction` (unit)."""
    b2 = np.asarray(direction, dtype=np.float64)
    b2 = b2 / np.linalg.norm(b2)
    helper = np.array([0.0, 0.0, 1.0])
    if abs(b2 @ helper) > 0.9:
        helper = np.array([1.0, 0.0, 0.0])
    b1 = np.cross(b2, helper)
    b1 /= np.linalg.norm(b1)
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=1)


def _rod(p0, p1, thickness):
    """Elongated ellipsoid spanning p0 to p1 with the given lateral radius."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    center = 0.5 * (p0 + p1)
    half = 0.5 * np.linalg.norm(p1 - p0)
    r = _frame_along(p1 - p0)
    diag = np.array([thickness**2, half**2, thickness**2])
    return Ellipsoid(center=center, shape=(r * diag) @ r.T)


def _sphere_scene():
    return SceneSpec("sphere", ((np.zeros(3), 0.25 * np.eye(3)),))


def _tripod_scene():
    # One body blob plus three deliberately asymmetric legs (azimuths and
    # spans differ) so recovery is unique up to Gaussian permutation; every
    # shape eigenvalue stays inside the fit's representable range.
    body = Ellipsoid(
        center=np.array([0.0, 0.24, 0.0]),
        shape=np.diag([0.28**2, 0.15**2, 0.21**2]),
    )
    hip = np.array([0.0, 0.08, 0.0])
    legs = []
    for azimuth_deg, reach, drop in ((10.0, 0.34, -0.48), (130.0, 0.30, -0.44), (255.0, 0.38, -0.50)):
        a = np.deg2rad(azimuth_deg)
        foot = np.array([reach * np.cos(a), drop, -reach * np.sin(a)])
        legs.append(_rod(hip, foot, 0.105))
    return SceneSpec("tripod", (body, *legs))


def _quad_scene():
    blobs = (
        (np.array([0.32, 0.3, 0.0]), np.diag([0.16**2, 0.13**2, 0.14**2])),
        (np.array([-0.36, 0.22, 0.12]), np.diag([0.12**2, 0.18**2, 0.12**2])),
        (np.array([0.05, -0.3, -0.2]), np.diag([0.2**2, 0.12**2, 0.15**2])),
        (np.array([-0.12, -0.06, 0.3]), np.diag([0.13**2, 0.13**2, 0.19**2])),
    )
    return SceneSpec("quad", blobs)


BUILTIN_SCENES = {
    "sphere": _sphere_scene,
    "tripod": _tripod_scene,
    "quad": _quad_scene,
}


def builtin_scene(name: str) -> SceneSpec:
    try:
        return BUILTIN_SCENES[name]()
    except KeyError:
        raise ValueError(
            f"unknown scene '{name}'; choices: {sorted(BUILTIN_SCENES)}"
        ) from None
