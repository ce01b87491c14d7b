"""Gradient-based fitting of Gaussian mixtures to silhouette datasets."""

from .adam import AdamState, adam_step
from .fit import FitConfig, FitData, FitResult, fit, init_theta, loss_and_grad
from .params import ParamLayout, reparameterize

__all__ = [
    "AdamState",
    "FitConfig",
    "FitData",
    "FitResult",
    "ParamLayout",
    "adam_step",
    "fit",
    "init_theta",
    "loss_and_grad",
    "reparameterize",
]
