"""Differentiable silhouette loss: raw vector -> scalar, with exact grads.

The graph re-expresses the value-level mathematics (reparameterization,
transform composition, tangent-cone projection, rasterization, L1 loss)
in jax so reverse-mode differentiation and XLA compilation apply; a
cross-consistency test pins it to the numpy implementations. Gaussians
whose projection preconditions fail contribute all-zero maps instead of
aborting the step, and their count is reported for diagnostics.
"""

from dataclasses import dataclass
from functools import lru_cache, partial

from . import _jaxsetup  # noqa: F401  (x64 + threading, before jax use)

import jax
import jax.numpy as jnp

from ..gauss.projection import MAHA_MARGIN, MIN_DEPTH
from ..gauss.types import THETA_BOUND, TRANS_BOUND
from .params import LN_SCALE_HI, ParamLayout, split_cov_raw

EXP_CLIP = 700.0  # keeps exp(-q) away from the denormal range


@dataclass(frozen=True)
class GraphSpec:
    """Static description of one compiled loss graph."""

    layout: ParamLayout
    height: int
    width: int
    reg_weight: float
    eig_lo: float = 0.01
    eig_hi: float = 0.51


def _sigmoid(x):
    return jax.nn.sigmoid(x)


def _cov_factor_eig(cov_raw, lo, hi):
    """Orthonormal basis and sqrt-eigenvalues from eig raws.

    Falls back to the deterministic identity basis when the cross product
    degenerates; the switch happens on the inputs so no NaN can leak into
    the gradient of the taken branch. Columns are sorted by ascending
    eigenvalue so the factor agrees with the eigendecomposition convention
    used when models are re-instantiated from persisted covariances.
    """
    v1_raw, v2_raw, eig_raw = split_cov_raw(cov_raw, "eig")
    cross = jnp.cross(v1_raw, v2_raw)
    bad = (jnp.linalg.norm(cross, axis=-1) < 1e-9)[..., None]
    e1 = jnp.array([1.0, 0.0, 0.0])
    e3n = jnp.array([0.0, 0.0, -1.0])
    v1 = jnp.where(bad, e1, v1_raw)
    v2r = jnp.where(bad, e3n, v2_raw)
    v2 = jnp.cross(v1, v2r)
    v3 = jnp.cross(v1, v2)
    cols = [v / jnp.linalg.norm(v, axis=-1, keepdims=True) for v in (v1, v2, v3)]
    u = jnp.stack(cols, axis=-1)
    lam = lo + _sigmoid(eig_raw) * (hi - lo)
    order = jnp.argsort(lam, axis=-1)
    lam = jnp.take_along_axis(lam, order, axis=-1)
    u = jnp.take_along_axis(u, order[..., None, :], axis=-1)
    return u, jnp.sqrt(lam)


def _cov_chol(cov_raw, lo, hi):
    diag_raw, offdiag = split_cov_raw(cov_raw, "cholesky")
    d = jnp.clip(jnp.exp(diag_raw), jnp.sqrt(lo), jnp.sqrt(hi))
    z = jnp.zeros_like(d[..., 0])
    row0 = jnp.stack([d[..., 0], z, z], axis=-1)
    row1 = jnp.stack([offdiag[..., 0], d[..., 1], z], axis=-1)
    row2 = jnp.stack([offdiag[..., 1], offdiag[..., 2], d[..., 2]], axis=-1)
    return jnp.stack([row0, row1, row2], axis=-2)


CORR_CLIP = 1.0 - 1e-9


def _cov_condcorr(cov_raw, lo, hi):
    sigma_raw, c12_raw, c13_raw, c23g1_raw = split_cov_raw(cov_raw, "condcorr")
    s_lo, s_hi = jnp.sqrt(lo), jnp.sqrt(hi)
    sig = s_lo + _sigmoid(sigma_raw) * (s_hi - s_lo)
    c12 = jnp.clip(jnp.tanh(c12_raw), -CORR_CLIP, CORR_CLIP)
    c13 = jnp.clip(jnp.tanh(c13_raw), -CORR_CLIP, CORR_CLIP)
    c23g1 = jnp.clip(jnp.tanh(c23g1_raw), -CORR_CLIP, CORR_CLIP)
    c23 = c12 * c13 + c23g1 * jnp.sqrt((1.0 - c12**2) * (1.0 - c13**2))
    s1, s2, s3 = sig[..., 0], sig[..., 1], sig[..., 2]
    row0 = jnp.stack([s1 * s1, c12 * s1 * s2, c13 * s1 * s3], axis=-1)
    row1 = jnp.stack([c12 * s1 * s2, s2 * s2, c23 * s2 * s3], axis=-1)
    row2 = jnp.stack([c13 * s1 * s3, c23 * s2 * s3, s3 * s3], axis=-1)
    return jnp.stack([row0, row1, row2], axis=-2)


def _cov_matrix(cov_raw, param, lo, hi):
    if param == "eig":
        u, sq = _cov_factor_eig(cov_raw, lo, hi)
        return (u * (sq * sq)[..., None, :]) @ jnp.swapaxes(u, -1, -2)
    if param == "cholesky":
        l = _cov_chol(cov_raw, lo, hi)
        return l @ jnp.swapaxes(l, -1, -2)
    return _cov_condcorr(cov_raw, lo, hi)


def _cov_eigfactor(cov_raw, param, lo, hi):
    """(U, sqrt eigenvalues) of the canonical covariance, differentiably.

    The eig parameterization provides the factor directly; the other two
    go through jnp.linalg.eigh, whose gradient requires distinct
    eigenvalues (initialization tie-breaking keeps fits away from exact
    ties).
    """
    if param == "eig":
        return _cov_factor_eig(cov_raw, lo, hi)
    cov = _cov_matrix(cov_raw, param, lo, hi)
    lam, u = jnp.linalg.eigh(cov)
    return u, jnp.sqrt(jnp.clip(lam, 1e-12))


def _yaw_matrices(phi):
    c, s = jnp.cos(phi), jnp.sin(phi)
    z = jnp.zeros_like(c)
    o = jnp.ones_like(c)
    rows = [
        jnp.stack([c, z, s], axis=-1),
        jnp.stack([z, o, z], axis=-1),
        jnp.stack([-s, z, c], axis=-1),
    ]
    return jnp.stack(rows, axis=-2)


def _euler_matrices(theta):
    tx, ty, tz = theta[..., 0], theta[..., 1], theta[..., 2]
    z = jnp.zeros_like(tx)
    o = jnp.ones_like(tx)
    cx, sx = jnp.cos(tx), jnp.sin(tx)
    cy, sy = jnp.cos(ty), jnp.sin(ty)
    cz, sz = jnp.cos(tz), jnp.sin(tz)
    rx = jnp.stack(
        [jnp.stack([o, z, z], -1), jnp.stack([z, cx, -sx], -1), jnp.stack([z, sx, cx], -1)],
        axis=-2,
    )
    ry = jnp.stack(
        [jnp.stack([cy, z, sy], -1), jnp.stack([z, o, z], -1), jnp.stack([-sy, z, cy], -1)],
        axis=-2,
    )
    rz = jnp.stack(
        [jnp.stack([cz, -sz, z], -1), jnp.stack([sz, cz, z], -1), jnp.stack([z, z, o], -1)],
        axis=-2,
    )
    return rz @ ry @ rx


def _inv3(m):
    """Adjugate-based 3x3 inverse over leading batch dims."""
    a = m[..., 0, 0]
    b = m[..., 0, 1]
    c = m[..., 0, 2]
    d = m[..., 1, 1]
    e = m[..., 1, 2]
    f = m[..., 2, 2]
    ca = d * f - e * e
    cb = c * e - b * f
    cc = b * e - c * d
    det = a * ca + b * cb + c * cc
    row0 = jnp.stack([ca, cb, cc], axis=-1)
    row1 = jnp.stack([cb, a * f - c * c, b * c - a * e], axis=-1)
    row2 = jnp.stack([cc, b * c - a * e, a * d - b * b], axis=-1)
    adj = jnp.stack([row0, row1, row2], axis=-2)
    return adj / det[..., None, None]


def _world_gaussians(theta, spec: GraphSpec, data):
    """Raws -> per-image world means (N,K,3) and covariances (N,K,3,3)."""
    layout = spec.layout
    parts = layout.unpack(theta)
    mu = jnp.tanh(parts["mu_raw"])
    if layout.mode == "single":
        cov = _cov_matrix(parts["cov_raw"], layout.param, spec.eig_lo, spec.eig_hi)
        return mu, cov, None
    u, sq = _cov_eigfactor(parts["cov_raw"], layout.param, spec.eig_lo, spec.eig_hi)
    s = jnp.exp(LN_SCALE_HI * jnp.tanh(parts["s_raw"]))
    t = TRANS_BOUND * jnp.tanh(parts["t_raw"])
    th = THETA_BOUND * jnp.tanh(parts["th_raw"])
    if layout.free_yaw:
        yaw = jnp.pi * jnp.tanh(parts["yaw_raw"])
    else:
        yaw = data["yaws"]
    r_yaw = _yaw_matrices(yaw)  # (N,3,3)
    r_th = _euler_matrices(th)  # (N,K,3,3)
    mu_world = jnp.einsum("nab,nkb->nka", r_yaw, mu[None] + t)
    b = jnp.einsum("nab,nkbc->nkac", r_yaw, r_th @ u[None]) * (s * sq[None])[..., None, :]
    cov_world = b @ jnp.swapaxes(b, -1, -2)
    ln_s = LN_SCALE_HI * jnp.tanh(parts["s_raw"])
    reg = (t * t).sum(-1) + (ln_s * ln_s).sum(-1) + (th * th).sum(-1)
    return mu_world, cov_world, reg


def _project_pixels(mu_world, cov_world, data):
    """World Gaussians -> pixel-space ellipse parameters with validity.

    Returns (mu_px, inv_cov_px, valid); invalid entries carry harmless
    placeholder values so no NaN enters any gradient path.
    """
    rot = data["rot"]
    pos = data["pos"]
    k33 = data["k33"]
    principal = data["principal"]
    mu_o = jnp.einsum("ab,...b->...a", rot, mu_world - pos)
    cov_o = jnp.einsum("ab,...bc,dc->...ad", rot, cov_world, rot)
    a_mat = _inv3(cov_o)
    a_mat = 0.5 * (a_mat + jnp.swapaxes(a_mat, -1, -2))
    amu = jnp.einsum("...ab,...b->...a", a_mat, mu_o)
    maha = jnp.einsum("...a,...a->...", mu_o, amu)
    valid = (mu_o[..., 2] >= MIN_DEPTH) & (maha > 1.0 + MAHA_MARGIN)
    m = amu[..., :, None] * amu[..., None, :] - (maha - 1.0)[..., None, None] * a_mat
    p = m[..., 0, 0]
    q = 2.0 * m[..., 0, 1]
    r = m[..., 1, 1]
    s = 2.0 * m[..., 0, 2]
    t = 2.0 * m[..., 1, 2]
    det33 = p * r - 0.25 * q * q
    valid &= det33 > 0.0
    denom = jnp.where(valid, 4.0 * p * r - q * q, 1.0)
    mu_t = jnp.stack(
        [(q * t - 2.0 * r * s) / denom, (s * q - 2.0 * p * t) / denom], axis=-1
    )
    det_m = jnp.linalg.det(m)
    det33_safe = jnp.where(valid, det33, 1.0)
    scale = -det_m / det33_safe
    inv33 = (
        jnp.stack(
            [
                jnp.stack([r, -0.5 * q], axis=-1),
                jnp.stack([-0.5 * q, p], axis=-1),
            ],
            axis=-2,
        )
        / det33_safe[..., None, None]
    )
    cov_t = scale[..., None, None] * inv33
    valid &= (cov_t[..., 0, 0] > 0.0) & (jnp.linalg.det(cov_t) > 0.0)
    mu_px = jnp.einsum("ab,...b->...a", k33, mu_t) + principal
    cov_px = jnp.einsum("ab,...bc,dc->...ad", k33, cov_t, k33)
    det_px = cov_px[..., 0, 0] * cov_px[..., 1, 1] - cov_px[..., 0, 1] * cov_px[..., 1, 0]
    det_safe = jnp.where(valid, det_px, 1.0)
    eye2 = jnp.eye(2)
    inv_cov_px = jnp.where(
        valid[..., None, None],
        jnp.stack(
            [
                jnp.stack([cov_px[..., 1, 1], -cov_px[..., 0, 1]], axis=-1),
                jnp.stack([-cov_px[..., 1, 0], cov_px[..., 0, 0]], axis=-1),
            ],
            axis=-2,
        )
        / det_safe[..., None, None],
        eye2,
    )
    return mu_px, cov_px, inv_cov_px, valid


def _raster_sum(mu_px, inv_cov_px, valid, height, width, n_images, k):
    """Summed density maps (N,H,W); invalid Gaussians contribute zero."""
    xs = jnp.arange(width) + 0.5
    ys = jnp.arange(height) + 0.5
    mu = mu_px.reshape(n_images, k, 2)
    ic = inv_cov_px.reshape(n_images, k, 2, 2)
    ok = valid.reshape(n_images, k)
    dx = xs[None, None, :] - mu[..., 0][..., None]  # (N,K,W)
    dy = ys[None, None, :] - mu[..., 1][..., None]  # (N,K,H)
    a = ic[..., 0, 0][..., None, None]
    b = ic[..., 0, 1][..., None, None]
    c = ic[..., 1, 1][..., None, None]
    q = (
        a * (dx * dx)[:, :, None, :]
        + c * (dy * dy)[:, :, :, None]
        + 2.0 * b * dy[:, :, :, None] * dx[:, :, None, :]
    )
    maps = jnp.where(
        ok[..., None, None], jnp.exp(-jnp.minimum(q, EXP_CLIP)), 0.0
    )
    return maps.sum(axis=1)


def loss_fn(theta, data, spec: GraphSpec):
    """Scalar objective plus auxiliary diagnostics.

    Data term: mean over images of the mean absolute difference between
    mask and summed maps. Regularizer (canonical mode): reg_weight times
    the mean over images and Gaussians of |t|^2 + |ln s|^2 + |theta|^2.
    """
    layout = spec.layout
    mu_world, cov_world, reg = _world_gaussians(theta, spec, data)
    mu_px, _, inv_cov_px, valid = _project_pixels(mu_world, cov_world, data)
    sums = _raster_sum(
        mu_px, inv_cov_px, valid, spec.height, spec.width, layout.n_images, layout.k
    )
    loss = jnp.mean(jnp.abs(data["masks"] - sums))
    if reg is not None and spec.reg_weight != 0.0:
        loss = loss + spec.reg_weight * jnp.mean(reg)
    return loss, valid.reshape(layout.n_images, layout.k)


def render_sums(theta, data, spec: GraphSpec):
    """Forward-only summed maps (N,H,W), for evaluation and tests."""
    layout = spec.layout
    mu_world, cov_world, _ = _world_gaussians(theta, spec, data)
    mu_px, _, inv_cov_px, valid = _project_pixels(mu_world, cov_world, data)
    return _raster_sum(
        mu_px, inv_cov_px, valid, spec.height, spec.width, layout.n_images, layout.k
    )


def project_values(theta, data, spec: GraphSpec):
    """Pixel-space ellipse parameters, for cross-checks against the
    value-level projection."""
    mu_world, cov_world, _ = _world_gaussians(theta, spec, data)
    mu_px, cov_px, _, valid = _project_pixels(mu_world, cov_world, data)
    return mu_world, cov_world, mu_px, cov_px, valid


@lru_cache(maxsize=64)
def compiled(spec: GraphSpec):
    """(value_and_grad, loss_only) jitted for one graph shape."""
    vg = jax.jit(jax.value_and_grad(partial(loss_fn, spec=spec), has_aux=True))
    fwd = jax.jit(partial(loss_fn, spec=spec))
    return vg, fwd
