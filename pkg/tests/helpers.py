"""Shared random generators and independent geometric oracles."""

import numpy as np

from gmq.gauss import Camera, Gaussian3


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_spd(rng, lo=0.01, hi=0.51):
    v = random_rotation(rng)
    lam = rng.uniform(lo, hi, size=3)
    return (v * lam) @ v.T


def random_gaussian3(rng):
    return Gaussian3(mu=rng.uniform(-0.6, 0.6, size=3), cov=random_spd(rng))


def random_camera(rng, toward: Gaussian3):
    """Camera at distance 1.5..3 looking near the Gaussian's mean.

    Keeps the whole 1-level ellipsoid strictly in front of the camera so
    the projection preconditions hold.
    """
    rot = random_rotation(rng)
    d = rng.uniform(1.5, 3.0)
    lateral = rng.uniform(-0.5, 0.5, size=2)
    view_point = np.array([lateral[0], lateral[1], d])
    pos = toward.mu - rot.T @ view_point
    return Camera(
        fx=rng.uniform(80, 200),
        fy=rng.uniform(80, 200),
        skew=rng.uniform(-5, 5),
        cx=rng.uniform(100, 156),
        cy=rng.uniform(100, 156),
        rot=rot,
        pos=pos,
    )


def ray_ellipsoid_discriminant(g: Gaussian3, cam: Camera, direction_cam):
    """Quarter-discriminant of the ray/1-level-ellipsoid intersection.

    Computed directly from the camera-frame quadratic (independent of the
    tangent-cone construction): the ray x = t v is tangent iff this is 0.
    """
    mu_o = cam.rot @ (g.mu - cam.pos)
    cov_o = cam.rot @ g.cov @ cam.rot.T
    a_mat = np.linalg.inv(cov_o)
    v = np.asarray(direction_cam, dtype=np.float64)
    a = v @ a_mat @ v
    b = v @ a_mat @ mu_o
    c = mu_o @ a_mat @ mu_o - 1.0
    return b * b - a * c, b * b + abs(a * c)


def ellipse_boundary_dirs(g2, cam: Camera, n=16):
    """Camera-frame ray directions through n points on the 1-level ellipse."""
    lam, v = np.linalg.eigh(g2.cov_px)
    half = v @ np.diag(np.sqrt(lam))
    angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = g2.mu_px[:, None] + half @ np.stack([np.cos(angles), np.sin(angles)])
    k_inv = np.linalg.inv(cam.k33)
    canon = k_inv @ (pts - cam.principal[:, None])
    return np.concatenate([canon, np.ones((1, n))], axis=0).T
