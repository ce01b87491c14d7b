"""Rotation helpers and canonical-to-instance transform composition."""

import numpy as np

from .types import Camera, Gaussian3, PoseTransform


def yaw_matrix(phi):
    """Rotation by phi about world +y, right-handed.

    Maps (1,0,0) to (cos phi, 0, -sin phi): a positive yaw swings +x
    toward -z.
    """
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_xyz(theta):
    """Rotation from XYZ Euler angles: Rz(tz) @ Ry(ty) @ Rx(tx).

    Applied to a column vector this rotates about x first, then y, then z.
    """
    tx, ty, tz = np.asarray(theta, dtype=np.float64)
    cx, sx = np.cos(tx), np.sin(tx)
    cy, sy = np.cos(ty), np.sin(ty)
    cz, sz = np.cos(tz), np.sin(tz)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]], dtype=np.float64)
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]], dtype=np.float64)
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]], dtype=np.float64)
    return rz @ ry @ rx


def eig_factor(g: Gaussian3):
    """Factor cov = (U S)(U S)^T with orthonormal U and S = diag(sqrt(eigs)).

    Eigenvalues ascend; the decomposition is deterministic for a given
    covariance.
    """
    lam, u = np.linalg.eigh(g.cov)
    return u, np.sqrt(lam)


def compose_transform(canonical: Gaussian3, tf: PoseTransform, factor=None):
    """Apply a per-Gaussian pose transform to a canonical Gaussian.

    mu = R_yaw @ (mu_c + t)
    cov = B B^T with B = R_yaw @ R_theta @ U @ diag(s * sqrt_eigs)

    `factor` is the canonical (U, sqrt_eigs) pair; when omitted it is
    recovered by eigendecomposition. The per-axis scale s acts along the
    canonical eigenbasis axes, so the identity transform reproduces the
    canonical covariance exactly.
    """
    if factor is None:
        u, sqrt_eigs = eig_factor(canonical)
    else:
        u, sqrt_eigs = factor
        u = np.asarray(u, dtype=np.float64)
        sqrt_eigs = np.asarray(sqrt_eigs, dtype=np.float64)
    r_yaw = yaw_matrix(tf.yaw)
    r_theta = euler_xyz(tf.theta)
    mu = r_yaw @ (canonical.mu + tf.t)
    b = (r_yaw @ r_theta @ u) * (tf.s * sqrt_eigs)
    return Gaussian3(mu=mu, cov=b @ b.T)


def counter_rotated(cam: Camera, phi):
    """Camera observing the unrotated object exactly as `cam` observes the
    object yawed by phi: the camera orbits the yaw axis the opposite way.

    rot' = rot @ R_yaw(phi), pos' = R_yaw(phi)^T @ pos.
    """
    r = yaw_matrix(phi)
    return Camera(
        fx=cam.fx,
        fy=cam.fy,
        skew=cam.skew,
        cx=cam.cx,
        cy=cam.cy,
        width=cam.width,
        height=cam.height,
        rot=cam.rot @ r,
        pos=r.T @ cam.pos,
    )
