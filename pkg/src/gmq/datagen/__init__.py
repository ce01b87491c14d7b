"""Synthetic datasets, mask IO, and model persistence."""

from .dataset import DatasetManifest, ManifestEntry, load_manifest, make_dataset, save_manifest
from .maskio import load_mask, save_mask
from .modelio import load_model, model_from_dict, model_to_dict, save_model
from .render import ray_grid, render_gt_mask
from .scenes import BUILTIN_SCENES, Ellipsoid, SceneSpec, builtin_scene

__all__ = [
    "BUILTIN_SCENES",
    "DatasetManifest",
    "Ellipsoid",
    "ManifestEntry",
    "SceneSpec",
    "builtin_scene",
    "load_manifest",
    "load_mask",
    "load_model",
    "make_dataset",
    "model_from_dict",
    "model_to_dict",
    "ray_grid",
    "render_gt_mask",
    "save_manifest",
    "save_mask",
    "save_model",
]
