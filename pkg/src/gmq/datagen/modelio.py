"""Model file (de)serialization with validation on parse.

The format is versioned UTF-8 JSON; floats are written with shortest
round-trip decimal representation so values survive a save/load cycle
bit for bit.
"""

import json

import numpy as np

from ..errors import InvariantViolation, IoError, ParseError
from ..gauss.types import (
    SYM_TOL,
    THETA_BOUND,
    TRANS_BOUND,
    SCALE_HI,
    SCALE_LO,
    Camera,
    Gaussian3,
    PoseTransform,
)
from ..model import CanonicalGaussian, ImagePose, Model

MODEL_VERSION = 1


def _camera_record(cam: Camera):
    return {
        "fx": cam.fx,
        "fy": cam.fy,
        "skew": cam.skew,
        "cx": cam.cx,
        "cy": cam.cy,
        "width": cam.width,
        "height": cam.height,
        "pos": list(cam.pos),
        "rot": [list(row) for row in cam.rot],
    }


def camera_from_record(rec, path="camera"):
    try:
        return Camera(
            fx=float(rec["fx"]),
            fy=float(rec["fy"]),
            skew=float(rec.get("skew", 0.0)),
            cx=float(rec["cx"]),
            cy=float(rec["cy"]),
            width=int(rec["width"]),
            height=int(rec["height"]),
            rot=np.array(rec["rot"], dtype=np.float64),
            pos=np.array(rec["pos"], dtype=np.float64),
        )
    except KeyError as e:
        raise ParseError(f"{path}.{e.args[0]}", "missing field") from e
    except (TypeError, ValueError) as e:
        raise InvariantViolation(path, str(e)) from e


def model_to_dict(model: Model):
    return {
        "version": MODEL_VERSION,
        "k": model.k,
        "parameterization": model.parameterization,
        "camera": _camera_record(model.camera),
        "canonical": [
            {
                "mu": list(c.gaussian.mu),
                "cov": [list(row) for row in c.gaussian.cov],
                **({"raw": c.raw} if c.raw is not None else {}),
            }
            for c in model.canonical
        ],
        "images": [
            {
                "id": im.id,
                "yaw_rad": im.yaw,
                "transforms": [
                    {"s": list(tf.s), "t": list(tf.t), "theta": list(tf.theta)}
                    for tf in im.transforms
                ],
            }
            for im in model.images
        ],
    }


def _vec(rec, key, n, path):
    try:
        v = np.asarray(rec[key], dtype=np.float64)
    except KeyError:
        raise ParseError(f"{path}.{key}", "missing field") from None
    except (TypeError, ValueError):
        raise ParseError(f"{path}.{key}", "not a numeric array") from None
    if v.shape != (n,) and v.shape != (n, n):
        raise ParseError(f"{path}.{key}", f"wrong shape {v.shape}")
    return v


def _canonical_from(rec, path):
    mu = _vec(rec, "mu", 3, path)
    cov = _vec(rec, "cov", 3, path)
    if cov.shape != (3, 3):
        raise ParseError(f"{path}.cov", f"wrong shape {cov.shape}")
    if np.max(np.abs(cov - cov.T)) > SYM_TOL:
        raise InvariantViolation(f"{path}.cov", "not symmetric within 1e-12")
    if np.linalg.eigvalsh(cov).min() < 1e-8:
        raise InvariantViolation(f"{path}.cov", "not positive definite")
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(cov))):
        raise InvariantViolation(path, "non-finite entries")
    return CanonicalGaussian(gaussian=Gaussian3(mu=mu, cov=cov), raw=rec.get("raw"))


def _transform_from(rec, path):
    s = _vec(rec, "s", 3, path)
    t = _vec(rec, "t", 3, path)
    theta = _vec(rec, "theta", 3, path)
    if np.any(s < SCALE_LO) or np.any(s > SCALE_HI):
        raise InvariantViolation(f"{path}.s", f"outside [{SCALE_LO}, {SCALE_HI}]")
    if np.any(np.abs(t) > TRANS_BOUND):
        raise InvariantViolation(f"{path}.t", f"outside [-{TRANS_BOUND}, {TRANS_BOUND}]")
    if np.any(np.abs(theta) > THETA_BOUND):
        raise InvariantViolation(f"{path}.theta", "outside [-pi/4, pi/4]")
    return PoseTransform(s=s, t=t, theta=theta)


def model_from_dict(doc):
    if not isinstance(doc, dict):
        raise ParseError("$", "model document must be an object")
    if doc.get("version") != MODEL_VERSION:
        raise ParseError("version", f"unsupported version {doc.get('version')!r}")
    for key in ("k", "parameterization", "camera", "canonical"):
        if key not in doc:
            raise ParseError(key, "missing field")
    camera = camera_from_record(doc["camera"])
    canonical = tuple(
        _canonical_from(rec, f"canonical[{i}]") for i, rec in enumerate(doc["canonical"])
    )
    if len(canonical) != doc["k"]:
        raise ParseError("k", f"k={doc['k']} but {len(canonical)} canonical entries")
    images = []
    for i, rec in enumerate(doc.get("images", [])):
        path = f"images[{i}]"
        if "id" not in rec:
            raise ParseError(f"{path}.id", "missing field")
        yaw = float(rec.get("yaw_rad", 0.0))
        if not (-np.pi <= yaw < np.pi):
            raise InvariantViolation(f"{path}.yaw_rad", "outside [-pi, pi)")
        tfs = tuple(
            _transform_from(t, f"{path}.transforms[{j}]")
            for j, t in enumerate(rec.get("transforms", []))
        )
        if tfs and len(tfs) != len(canonical):
            raise ParseError(f"{path}.transforms", "transform count != k")
        images.append(ImagePose(id=str(rec["id"]), yaw=yaw, transforms=tfs))
    return Model(
        parameterization=str(doc["parameterization"]),
        camera=camera,
        canonical=canonical,
        images=tuple(images),
    )


def save_model(model: Model, path):
    text = json.dumps(model_to_dict(model), indent=1)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text + "\n")
    except OSError as e:
        raise IoError(f"{path}: {e}") from e


def load_model(path) -> Model:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("$", f"invalid JSON: {e}") from e
    return model_from_dict(doc)
