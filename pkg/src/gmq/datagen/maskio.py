"""Mask image files: 8-bit grayscale PNG, 255 = foreground."""

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import IoError, UnsupportedFormat
from ..raster import MaskImage


def load_mask(path) -> MaskImage:
    """Read an image file as a mask; values map through v / 255."""
    try:
        with Image.open(path) as img:
            gray = img.convert("L")
            data = np.asarray(gray, dtype=np.float64) / 255.0
    except UnidentifiedImageError as e:
        raise UnsupportedFormat(f"{path}: {e}") from e
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    return MaskImage(data=data)


def save_mask(mask: MaskImage, path):
    """Write a mask as 8-bit grayscale PNG (round-to-nearest of v * 255)."""
    data = np.rint(mask.data * 255.0).astype(np.uint8)
    try:
        Image.fromarray(data, mode="L").save(path, format="PNG")
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
