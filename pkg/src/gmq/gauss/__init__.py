"""Value-level Gaussian/camera mathematics."""

from .covariance import (
    build_cov_cholesky,
    build_cov_cholesky_batch,
    build_cov_condcorr,
    build_cov_condcorr_batch,
    build_cov_eig,
    build_cov_eig_batch,
    cross_basis,
)
from .density import eval_density2, eval_density3
from .projection import (
    cone_matrix,
    conic_to_ellipse,
    ellipse_center_minor_form,
    project,
)
from .transforms import (
    compose_transform,
    counter_rotated,
    eig_factor,
    euler_xyz,
    yaw_matrix,
)
from .types import (
    Camera,
    ConicMatrix,
    CovParamsChol,
    CovParamsCondCorr,
    CovParamsEig,
    Gaussian2,
    Gaussian3,
    PoseTransform,
)

__all__ = [
    "Camera",
    "ConicMatrix",
    "CovParamsChol",
    "CovParamsCondCorr",
    "CovParamsEig",
    "Gaussian2",
    "Gaussian3",
    "PoseTransform",
    "build_cov_cholesky",
    "build_cov_cholesky_batch",
    "build_cov_condcorr",
    "build_cov_condcorr_batch",
    "build_cov_eig",
    "build_cov_eig_batch",
    "compose_transform",
    "cone_matrix",
    "conic_to_ellipse",
    "counter_rotated",
    "cross_basis",
    "eig_factor",
    "ellipse_center_minor_form",
    "eval_density2",
    "eval_density3",
    "euler_xyz",
    "project",
    "yaw_matrix",
]
