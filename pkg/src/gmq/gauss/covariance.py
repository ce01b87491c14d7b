"""SPD covariance constructions from unconstrained raw parameters.

Three interchangeable routes, each guaranteeing a symmetric positive
definite 3x3 matrix for every finite raw input:

* eigenbasis: orthonormal basis from repeated cross products, eigenvalues
  sigmoid-bounded to [eig_lo, eig_hi];
* Cholesky factor: lower-triangular L with positive (clamped) diagonal,
  covariance L @ L.T;
* conditional correlation: bounded standard deviations plus a correlation
  triple completed through the partial correlation of axes (2,3) given 1.

The `*_batch` variants accept stacked raw arrays with an arbitrary number
of leading dimensions; they exist so large property sweeps stay vectorized.
"""

import numpy as np

from ..errors import DegenerateBasis
from .types import CovParamsChol, CovParamsCondCorr, CovParamsEig

CROSS_EPS = 1e-9

# tanh saturates to exactly +-1.0 in float64 for |x| > ~19, which would
# make the correlation matrix singular; keep correlations strictly interior.
CORR_CLIP = 1.0 - 1e-9

# Deterministic replacement inputs used when the cross-product basis
# degenerates; (e1, -e3) seeds the exact identity basis.
FALLBACK_V1 = np.array([1.0, 0.0, 0.0])
FALLBACK_V2RAW = np.array([0.0, 0.0, -1.0])


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def bounded_eigenvalues(eig_raw, lo, hi):
    """Map unbounded raws into (lo, hi) by scaled sigmoid."""
    return lo + sigmoid(eig_raw) * (hi - lo)


def cross_basis(v1, v2_raw):
    """Orthonormal basis [v1, v1 x v2_raw, v1 x (v1 x v2_raw)], columns.

    Raises DegenerateBasis when the first cross product has norm below
    1e-9 (near-parallel inputs); callers that must not fail substitute
    FALLBACK_V1/FALLBACK_V2RAW and retry.
    """
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.cross(v1, np.asarray(v2_raw, dtype=np.float64))
    if np.linalg.norm(v2) < CROSS_EPS:
        raise DegenerateBasis(
            f"|v1 x v2_raw| = {np.linalg.norm(v2):.3e} < {CROSS_EPS:g}"
        )
    v3 = np.cross(v1, v2)
    cols = [v / np.linalg.norm(v) for v in (v1, v2, v3)]
    return np.stack(cols, axis=1)


def build_cov_eig(p: CovParamsEig):
    """Covariance V diag(lam) V^T with orthonormal V and bounded lam."""
    v = cross_basis(p.v1_raw, p.v2_raw)
    lam = bounded_eigenvalues(p.eig_raw, p.eig_lo, p.eig_hi)
    return (v * lam) @ v.T


def build_cov_eig_batch(v1_raw, v2_raw, eig_raw, lo=0.01, hi=0.51):
    """Vectorized eigenbasis construction over leading dimensions.

    Degenerate rows fall back to the deterministic identity basis instead
    of raising; returns (..., 3, 3).
    """
    v1 = np.asarray(v1_raw, dtype=np.float64)
    v2r = np.asarray(v2_raw, dtype=np.float64)
    v2 = np.cross(v1, v2r)
    bad = np.linalg.norm(v2, axis=-1) < CROSS_EPS
    if np.any(bad):
        v1 = np.where(bad[..., None], FALLBACK_V1, v1)
        v2r = np.where(bad[..., None], FALLBACK_V2RAW, v2r)
        v2 = np.cross(v1, v2r)
    v3 = np.cross(v1, v2)
    cols = [v / np.linalg.norm(v, axis=-1, keepdims=True) for v in (v1, v2, v3)]
    v = np.stack(cols, axis=-1)
    lam = bounded_eigenvalues(eig_raw, lo, hi)
    return (v * lam[..., None, :]) @ np.swapaxes(v, -1, -2)


def _chol_factor(diag_raw, offdiag, lo, hi):
    d = np.exp(np.asarray(diag_raw, dtype=np.float64))
    if lo is not None:
        d = np.maximum(d, np.sqrt(lo))
    if hi is not None:
        d = np.minimum(d, np.sqrt(hi))
    o = np.asarray(offdiag, dtype=np.float64)
    zeros = np.zeros_like(d[..., 0])
    row0 = np.stack([d[..., 0], zeros, zeros], axis=-1)
    row1 = np.stack([o[..., 0], d[..., 1], zeros], axis=-1)
    row2 = np.stack([o[..., 1], o[..., 2], d[..., 2]], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def build_cov_cholesky(p: CovParamsChol):
    """Covariance L L^T from a lower-triangular factor with bounded diagonal."""
    l = _chol_factor(p.diag_raw, p.offdiag, p.eig_lo, p.eig_hi)
    return l @ l.T


def build_cov_cholesky_batch(diag_raw, offdiag, lo=0.01, hi=0.51):
    l = _chol_factor(diag_raw, offdiag, lo, hi)
    return l @ np.swapaxes(l, -1, -2)


def _condcorr_parts(sigma_raw, c12_raw, c13_raw, c23g1_raw, lo, hi):
    s_lo, s_hi = np.sqrt(lo), np.sqrt(hi)
    sig = s_lo + sigmoid(np.asarray(sigma_raw, dtype=np.float64)) * (s_hi - s_lo)
    c12 = np.clip(np.tanh(c12_raw), -CORR_CLIP, CORR_CLIP)
    c13 = np.clip(np.tanh(c13_raw), -CORR_CLIP, CORR_CLIP)
    c23g1 = np.clip(np.tanh(c23g1_raw), -CORR_CLIP, CORR_CLIP)
    c23 = c12 * c13 + c23g1 * np.sqrt((1.0 - c12**2) * (1.0 - c13**2))
    return sig, c12, c13, c23


def _condcorr_assemble(sig, c12, c13, c23):
    s1, s2, s3 = sig[..., 0], sig[..., 1], sig[..., 2]
    row0 = np.stack([s1 * s1, c12 * s1 * s2, c13 * s1 * s3], axis=-1)
    row1 = np.stack([c12 * s1 * s2, s2 * s2, c23 * s2 * s3], axis=-1)
    row2 = np.stack([c13 * s1 * s3, c23 * s2 * s3, s3 * s3], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def build_cov_condcorr(p: CovParamsCondCorr):
    """Covariance from bounded sigmas and a partial-correlation triple.

    Completing c23 = c12 c13 + c23|1 sqrt((1-c12^2)(1-c13^2)) keeps the
    correlation matrix inside the elliptope, so the result is SPD for all
    raw inputs.
    """
    sig, c12, c13, c23 = _condcorr_parts(
        p.sigma_raw, p.c12_raw, p.c13_raw, p.c23g1_raw, p.eig_lo, p.eig_hi
    )
    return _condcorr_assemble(sig, c12, c13, c23)


def build_cov_condcorr_batch(sigma_raw, c12_raw, c13_raw, c23g1_raw, lo=0.01, hi=0.51):
    sig, c12, c13, c23 = _condcorr_parts(sigma_raw, c12_raw, c13_raw, c23g1_raw, lo, hi)
    return _condcorr_assemble(sig, c12, c13, c23)
