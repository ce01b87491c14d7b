"""Synthetic mask dataset generation and the manifest file."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import IoError, ParseError
from ..gauss.types import Camera
from .maskio import save_mask
from .modelio import camera_from_record, _camera_record
from .render import render_gt_mask
from .scenes import SceneSpec, builtin_scene

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class ManifestEntry:
    mask: str
    split: str
    yaw: float | None = None


@dataclass(frozen=True)
class DatasetManifest:
    camera: Camera
    entries: tuple
    scene: str | None = None
    root: Path = Path(".")

    def split_entries(self, split=None):
        if split is None:
            return list(self.entries)
        return [e for e in self.entries if e.split == split]

    def mask_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.mask


def make_dataset(scene, n_views, seed, out_dir, cam: Camera | None = None):
    """Render n_views yaws of a scene and write masks plus a manifest.

    Yaws are uniform in [-pi, pi) from a seeded generator; entries get a
    deterministic shuffled 90/10 train/test split. Byte-identical outputs
    for identical arguments.
    """
    if n_views < 1:
        raise ValueError("n_views must be >= 1")
    if isinstance(scene, str):
        scene = builtin_scene(scene)
    if cam is None:
        cam = Camera()
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"{out}: {e}") from e
    rng = np.random.default_rng(seed)
    yaws = rng.uniform(-np.pi, np.pi, size=n_views)
    order = rng.permutation(n_views)
    n_train = max(1, int(round(0.9 * n_views))) if n_views > 1 else 1
    split = np.empty(n_views, dtype=object)
    split[order[:n_train]] = "train"
    split[order[n_train:]] = "test"
    entries = []
    for i, yaw in enumerate(yaws):
        name = f"mask_{i:04d}.png"
        save_mask(render_gt_mask(scene, yaw, cam), out / name)
        entries.append(ManifestEntry(mask=name, split=str(split[i]), yaw=float(yaw)))
    manifest = DatasetManifest(
        camera=cam, entries=tuple(entries), scene=scene.name, root=out
    )
    save_manifest(manifest, out / MANIFEST_NAME)
    return manifest


def manifest_to_dict(manifest: DatasetManifest):
    doc = {
        "version": MANIFEST_VERSION,
        "camera": _camera_record(manifest.camera),
        "entries": [
            {
                "mask": e.mask,
                **({"yaw_rad": e.yaw} if e.yaw is not None else {}),
                "split": e.split,
            }
            for e in manifest.entries
        ],
    }
    if manifest.scene is not None:
        doc["scene"] = manifest.scene
    return doc


def save_manifest(manifest: DatasetManifest, path):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(manifest_to_dict(manifest), indent=1) + "\n")
    except OSError as e:
        raise IoError(f"{path}: {e}") from e


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError("$", f"invalid JSON: {e}") from e
    if doc.get("version") != MANIFEST_VERSION:
        raise ParseError("version", f"unsupported version {doc.get('version')!r}")
    if "camera" not in doc or "entries" not in doc:
        raise ParseError("$", "manifest needs 'camera' and 'entries'")
    entries = []
    for i, rec in enumerate(doc["entries"]):
        if "mask" not in rec:
            raise ParseError(f"entries[{i}].mask", "missing field")
        split = rec.get("split", "train")
        if split not in ("train", "test"):
            raise ParseError(f"entries[{i}].split", f"invalid split {split!r}")
        yaw = rec.get("yaw_rad")
        if yaw is not None:
            yaw = float(yaw)
            if not (-np.pi <= yaw < np.pi):
                raise ParseError(f"entries[{i}].yaw_rad", "outside [-pi, pi)")
        entries.append(ManifestEntry(mask=str(rec["mask"]), split=split, yaw=yaw))
    return DatasetManifest(
        camera=camera_from_record(doc["camera"]),
        entries=tuple(entries),
        scene=doc.get("scene"),
        root=path.parent,
    )
