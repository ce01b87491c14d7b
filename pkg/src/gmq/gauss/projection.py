"""Analytic projection of a 3D Gaussian to a 2D image-plane Gaussian.

The projection runs in three exact steps:

1. cone_matrix: transform to the camera frame and form the 3x3 quadratic
   form M of the cone of rays (through the camera center) tangent to the
   1-level ellipsoid; tangent directions d satisfy d^T M d = 0.
2. conic_to_ellipse: intersect the cone with the canonical plane z = 1 and
   read off the ellipse center and 2x2 shape matrix in closed form.
3. pixel transform: map canonical-plane coordinates through the intrinsic
   2x2 block and principal point.

Every step is smooth in its inputs away from the stated error conditions,
which is what makes silhouette losses differentiable end to end.
"""

import numpy as np

from ..errors import BehindCamera, CameraInsideGaussian, NotAnEllipse
from .types import Camera, ConicMatrix, Gaussian2, Gaussian3

MIN_DEPTH = 0.05
MAHA_MARGIN = 1e-9


def cone_matrix(g: Gaussian3, cam: Camera) -> ConicMatrix:
    """Quadratic form of the tangent cone in the camera frame.

    With mu_o, cov_o the camera-frame mean/covariance and a = cov_o^{-1}:

        M = (a mu_o)(a mu_o)^T - (mu_o^T a mu_o - 1) a

    The camera center is the origin of its own frame, so rays are x = t d
    and tangency is d^T M d = 0.
    """
    mu_o = cam.rot @ (g.mu - cam.pos)
    if mu_o[2] < MIN_DEPTH:
        raise BehindCamera(f"camera-frame depth {mu_o[2]:.4f} < {MIN_DEPTH}")
    cov_o = cam.rot @ g.cov @ cam.rot.T
    a = np.linalg.inv(cov_o)
    a = 0.5 * (a + a.T)
    amu = a @ mu_o
    maha = float(mu_o @ amu)
    if maha <= 1.0 + MAHA_MARGIN:
        raise CameraInsideGaussian(
            f"camera center has squared Mahalanobis distance {maha:.6f} <= 1"
        )
    m = np.outer(amu, amu) - (maha - 1.0) * a
    return ConicMatrix(m=0.5 * (m + m.T))


def _conic_coeffs(m):
    p = m[0, 0]
    q = 2.0 * m[0, 1]
    r = m[1, 1]
    s = 2.0 * m[0, 2]
    t = 2.0 * m[1, 2]
    u = m[2, 2]
    return p, q, r, s, t, u


def conic_to_ellipse(conic: ConicMatrix):
    """Center and SPD shape matrix of the ellipse cut on the plane z = 1.

    Using the polynomial coefficients p..u of the conic:

        mu  = (q t - 2 r s,  s q - 2 p t) / (4 p r - q^2)
        cov = -(det M / det M33) M33^{-1}

    where M33 is the top-left 2x2 block. The 1-level set of (mu, cov)
    coincides with the conic locus.
    """
    m = conic.m
    p, q, r, s, t, u = _conic_coeffs(m)
    m33 = m[:2, :2]
    det33 = p * r - 0.25 * q * q
    if det33 <= 0.0:
        raise NotAnEllipse(f"det M33 = {det33:.3e} <= 0")
    denom = 4.0 * p * r - q * q
    mu = np.array([(q * t - 2.0 * r * s) / denom, (s * q - 2.0 * p * t) / denom])
    det_m = np.linalg.det(m)
    inv33 = np.array([[r, -0.5 * q], [-0.5 * q, p]]) / det33
    cov = -(det_m / det33) * inv33
    cov = 0.5 * (cov + cov.T)
    if cov[0, 0] <= 0.0 or np.linalg.det(cov) <= 0.0:
        raise NotAnEllipse("projected shape matrix is not positive definite")
    return mu, cov


def ellipse_center_minor_form(conic: ConicMatrix):
    """Ellipse center via 2x2 minor determinants, for cross-checking.

    mu = (|M31|, -|M23|) / |M33| with M_ij the submatrix of M that deletes
    row i and column j. Algebraically identical to the polynomial form in
    conic_to_ellipse; the two routes must agree to 1e-10 relative.
    """
    m = conic.m

    def minor(i, j):
        sub = np.delete(np.delete(m, i - 1, axis=0), j - 1, axis=1)
        return np.linalg.det(sub)

    d33 = minor(3, 3)
    return np.array([minor(3, 1) / d33, -minor(2, 3) / d33])


def project(g: Gaussian3, cam: Camera) -> Gaussian2:
    """Full analytic projection: tangent cone, plane cut, pixel transform."""
    mu_t, cov_t = conic_to_ellipse(cone_matrix(g, cam))
    k = cam.k33
    return Gaussian2(mu_px=k @ mu_t + cam.principal, cov_px=k @ cov_t @ k.T)
