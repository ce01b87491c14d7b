"""Flat optimization-vector layout and its map to bounded model values.

Every optimization variable is unconstrained; bounds are enforced purely
by reparameterization:

    mean        component-wise tanh            -> (-1, 1)
    translation 0.3 tanh                       -> (-0.3, 0.3)
    rotation    (pi/4) tanh                    -> (-pi/4, pi/4)
    scale       exp(ln 2 * tanh)               -> (0.5, 2), raw 0 -> 1
    yaw         pi tanh                        -> (-pi, pi)
    covariance  routed to the configured SPD construction

Flat order: canonical mean+covariance raws (per image in single mode),
then per-image transform raws, then per-image yaw raws when yaw is free.
"""

from dataclasses import dataclass

import numpy as np

from ..gauss.covariance import (
    build_cov_cholesky_batch,
    build_cov_condcorr_batch,
    build_cov_eig_batch,
)
from ..gauss.types import SCALE_HI, THETA_BOUND, TRANS_BOUND

PARAMETERIZATIONS = ("eig", "cholesky", "condcorr")
MODES = ("single", "canonical")

COV_DIM = {"eig": 9, "cholesky": 6, "condcorr": 6}

LN_SCALE_HI = np.log(SCALE_HI)


@dataclass(frozen=True)
class ParamLayout:
    """Shape descriptor for the flat parameter vector."""

    mode: str
    param: str
    k: int
    n_images: int
    free_yaw: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.param not in PARAMETERIZATIONS:
            raise ValueError(f"unknown parameterization {self.param!r}")
        if self.k < 1 or self.n_images < 1:
            raise ValueError("k and n_images must be >= 1")
        if self.mode == "single" and self.free_yaw:
            raise ValueError("single mode has no yaw variable")

    @property
    def cov_dim(self):
        return COV_DIM[self.param]

    @property
    def gauss_dim(self):
        return 3 + self.cov_dim

    @property
    def size(self):
        n, k = self.n_images, self.k
        if self.mode == "single":
            return n * k * self.gauss_dim
        total = k * self.gauss_dim + n * k * 9
        if self.free_yaw:
            total += n
        return total

    def unpack(self, theta):
        """Flat vector -> named raw blocks (works on numpy or jax arrays)."""
        n, k, d = self.n_images, self.k, self.gauss_dim
        if self.mode == "single":
            block = theta[: n * k * d].reshape(n, k, d)
            return {"mu_raw": block[..., :3], "cov_raw": block[..., 3:]}
        c = k * d
        canonical = theta[:c].reshape(k, d)
        tf = theta[c : c + n * k * 9].reshape(n, k, 9)
        parts = {
            "mu_raw": canonical[:, :3],
            "cov_raw": canonical[:, 3:],
            "s_raw": tf[..., 0:3],
            "t_raw": tf[..., 3:6],
            "th_raw": tf[..., 6:9],
        }
        if self.free_yaw:
            parts["yaw_raw"] = theta[c + n * k * 9 :]
        return parts

    def pack(self, parts):
        """Inverse of unpack; validates block shapes."""
        n, k = self.n_images, self.k
        if self.mode == "single":
            block = np.concatenate(
                [np.asarray(parts["mu_raw"]), np.asarray(parts["cov_raw"])], axis=-1
            )
            if block.shape != (n, k, self.gauss_dim):
                raise ValueError(f"bad block shape {block.shape}")
            return block.reshape(-1).astype(np.float64)
        canonical = np.concatenate(
            [np.asarray(parts["mu_raw"]), np.asarray(parts["cov_raw"])], axis=-1
        ).reshape(-1)
        tf = np.concatenate(
            [np.asarray(parts[key]) for key in ("s_raw", "t_raw", "th_raw")], axis=-1
        ).reshape(-1)
        pieces = [canonical, tf]
        if self.free_yaw:
            pieces.append(np.asarray(parts["yaw_raw"]).reshape(-1))
        flat = np.concatenate(pieces).astype(np.float64)
        if flat.shape != (self.size,):
            raise ValueError(f"bad vector size {flat.shape}")
        return flat


def split_cov_raw(cov_raw, param):
    """Covariance raw block -> per-construction argument tuple."""
    if param == "eig":
        return cov_raw[..., 0:3], cov_raw[..., 3:6], cov_raw[..., 6:9]
    if param == "cholesky":
        return cov_raw[..., 0:3], cov_raw[..., 3:6]
    return cov_raw[..., 0:3], cov_raw[..., 3], cov_raw[..., 4], cov_raw[..., 5]


def build_cov_batch(cov_raw, param):
    """Numpy covariance construction for a raw block of any batch shape."""
    args = split_cov_raw(np.asarray(cov_raw, dtype=np.float64), param)
    if param == "eig":
        return build_cov_eig_batch(*args)
    if param == "cholesky":
        return build_cov_cholesky_batch(*args)
    return build_cov_condcorr_batch(*args)


def reparameterize(theta, layout: ParamLayout):
    """Raw vector -> bounded model values (numpy).

    Returns a dict with means and covariances (per image in single mode),
    plus per-image transforms and yaw in canonical mode.
    """
    parts = layout.unpack(np.asarray(theta, dtype=np.float64))
    out = {
        "means": np.tanh(parts["mu_raw"]),
        "covs": build_cov_batch(parts["cov_raw"], layout.param),
    }
    if layout.mode == "canonical":
        out["s"] = np.exp(LN_SCALE_HI * np.tanh(parts["s_raw"]))
        out["t"] = TRANS_BOUND * np.tanh(parts["t_raw"])
        out["theta"] = THETA_BOUND * np.tanh(parts["th_raw"])
        if layout.free_yaw:
            out["yaw"] = np.pi * np.tanh(parts["yaw_raw"])
    return out
