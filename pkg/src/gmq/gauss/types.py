"""Value types for the Gaussian/camera model.

All arrays are float64 numpy; the scene is normalized to roughly [-1, 1]^3
in world units. Pose bounds follow the constrained-fit conventions used
throughout the library: scale in [0.5, 2], translation in [-0.3, 0.3],
per-axis rotation in [-pi/4, pi/4], yaw in [-pi, pi).
"""

from dataclasses import dataclass, field

import numpy as np

SYM_TOL = 1e-12
MIN_EIG = 1e-8
ROT_TOL = 1e-10

# Covariance eigenvalue bounds shared by all parameterizations.
EIG_LO_DEFAULT = 0.01
EIG_HI_DEFAULT = 0.51

# Pose bounds.
SCALE_LO, SCALE_HI = 0.5, 2.0
TRANS_BOUND = 0.3
THETA_BOUND = np.pi / 4


def _as_vec(x, n, name):
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {a.shape}")
    return a


def _as_mat(x, n, name):
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (n, n):
        raise ValueError(f"{name} must have shape ({n},{n}), got {a.shape}")
    return a


@dataclass(frozen=True)
class Gaussian3:
    """Unnormalized anisotropic 3D Gaussian: mean and SPD covariance."""

    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_vec(self.mu, 3, "mu"))
        object.__setattr__(self, "cov", _as_mat(self.cov, 3, "cov"))
        if not np.all(np.isfinite(self.mu)) or not np.all(np.isfinite(self.cov)):
            raise ValueError("Gaussian3 entries must be finite")
        if np.max(np.abs(self.cov - self.cov.T)) > SYM_TOL:
            raise ValueError("cov must be symmetric within 1e-12")
        if np.linalg.eigvalsh(self.cov).min() < MIN_EIG:
            raise ValueError("cov must be positive definite (min eigenvalue >= 1e-8)")


@dataclass(frozen=True)
class Gaussian2:
    """Projected 2D Gaussian in pixel coordinates.

    The 1-level set of the quadratic form is the silhouette of the source
    ellipsoid under the tangent-cone projection.
    """

    mu_px: np.ndarray
    cov_px: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu_px", _as_vec(self.mu_px, 2, "mu_px"))
        object.__setattr__(self, "cov_px", _as_mat(self.cov_px, 2, "cov_px"))
        c = self.cov_px
        if np.max(np.abs(c - c.T)) > SYM_TOL * max(1.0, np.abs(c).max()):
            raise ValueError("cov_px must be symmetric")
        if c[0, 0] <= 0 or np.linalg.det(c) <= 0:
            raise ValueError("cov_px must be positive definite")


@dataclass(frozen=True)
class CovParamsEig:
    """Raw inputs for the eigenbasis covariance construction.

    v1_raw and v2_raw seed an orthonormal basis via repeated cross
    products; eig_raw maps through a scaled sigmoid onto [eig_lo, eig_hi].
    """

    v1_raw: np.ndarray
    v2_raw: np.ndarray
    eig_raw: np.ndarray
    eig_lo: float = EIG_LO_DEFAULT
    eig_hi: float = EIG_HI_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "v1_raw", _as_vec(self.v1_raw, 3, "v1_raw"))
        object.__setattr__(self, "v2_raw", _as_vec(self.v2_raw, 3, "v2_raw"))
        object.__setattr__(self, "eig_raw", _as_vec(self.eig_raw, 3, "eig_raw"))
        if not (self.eig_lo > 0 and self.eig_hi > self.eig_lo):
            raise ValueError("require 0 < eig_lo < eig_hi")


@dataclass(frozen=True)
class CovParamsChol:
    """Raw inputs for the Cholesky-factor covariance construction.

    Diagonal of L is exp(diag_raw) clamped to [sqrt(eig_lo), sqrt(eig_hi)];
    set eig_lo/eig_hi to None to disable clamping.
    """

    diag_raw: np.ndarray
    offdiag: np.ndarray
    eig_lo: float | None = EIG_LO_DEFAULT
    eig_hi: float | None = EIG_HI_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "diag_raw", _as_vec(self.diag_raw, 3, "diag_raw"))
        object.__setattr__(self, "offdiag", _as_vec(self.offdiag, 3, "offdiag"))


@dataclass(frozen=True)
class CovParamsCondCorr:
    """Raw inputs for the conditional-correlation covariance construction.

    Standard deviations map into [sqrt(eig_lo), sqrt(eig_hi)] by scaled
    sigmoid; the three correlation raws map into (-1, 1) by tanh, with the
    (2,3) correlation derived from the partial correlation given axis 1.
    """

    sigma_raw: np.ndarray
    c12_raw: float
    c13_raw: float
    c23g1_raw: float
    eig_lo: float = EIG_LO_DEFAULT
    eig_hi: float = EIG_HI_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "sigma_raw", _as_vec(self.sigma_raw, 3, "sigma_raw"))
        if not (self.eig_lo > 0 and self.eig_hi > self.eig_lo):
            raise ValueError("require 0 < eig_lo < eig_hi")


@dataclass(frozen=True)
class PoseTransform:
    """Per-Gaussian scale/translation/rotation plus object yaw."""

    s: np.ndarray = field(default_factory=lambda: np.ones(3))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "s", _as_vec(self.s, 3, "s"))
        object.__setattr__(self, "t", _as_vec(self.t, 3, "t"))
        object.__setattr__(self, "theta", _as_vec(self.theta, 3, "theta"))
        tol = 1e-12
        if np.any(self.s < SCALE_LO - tol) or np.any(self.s > SCALE_HI + tol):
            raise ValueError(f"s must lie in [{SCALE_LO}, {SCALE_HI}]")
        if np.any(np.abs(self.t) > TRANS_BOUND + tol):
            raise ValueError(f"t components must lie in [-{TRANS_BOUND}, {TRANS_BOUND}]")
        if np.any(np.abs(self.theta) > THETA_BOUND + tol):
            raise ValueError("theta components must lie in [-pi/4, pi/4]")
        if not (-np.pi - tol <= self.yaw < np.pi + tol):
            raise ValueError("yaw must lie in [-pi, pi)")

    @classmethod
    def identity(cls):
        return cls()


@dataclass(frozen=True)
class Camera:
    """Perspective pinhole camera: intrinsics plus world->camera extrinsics.

    The camera looks down its own +z axis; a point x in world coordinates
    maps to rot @ (x - pos) in the camera frame.
    """

    fx: float = 128.0
    fy: float = 128.0
    skew: float = 0.0
    cx: float = 128.0
    cy: float = 128.0
    width: int = 256
    height: int = 256
    rot: np.ndarray = field(default_factory=lambda: np.eye(3))
    pos: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -2.0]))

    def __post_init__(self):
        object.__setattr__(self, "rot", _as_mat(self.rot, 3, "rot"))
        object.__setattr__(self, "pos", _as_vec(self.pos, 3, "pos"))
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if np.max(np.abs(self.rot.T @ self.rot - np.eye(3))) > ROT_TOL:
            raise ValueError("rot must be orthonormal within 1e-10")

    @property
    def k33(self):
        """Upper-left 2x2 of the intrinsic matrix: [[fx, skew], [0, fy]]."""
        return np.array([[self.fx, self.skew], [0.0, self.fy]])

    @property
    def principal(self):
        return np.array([self.cx, self.cy])


@dataclass(frozen=True)
class ConicMatrix:
    """Symmetric 3x3 coefficient matrix of a camera-frame tangent cone.

    Rows/columns are ordered (x, y, z); restricted to the canonical plane
    z = 1 the same matrix encodes the conic p x^2 + q xy + r y^2 + s x +
    t y + u = 0 with p = m[0,0], q = 2 m[0,1], r = m[1,1], s = 2 m[0,2],
    t = 2 m[1,2], u = m[2,2].
    """

    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", _as_mat(self.m, 3, "m"))
        scale = max(1.0, np.abs(self.m).max())
        if np.max(np.abs(self.m - self.m.T)) > SYM_TOL * scale:
            raise ValueError("conic matrix must be symmetric within 1e-12")
