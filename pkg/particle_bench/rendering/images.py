import numpy as np
from PIL import Image

from ..exceptions import InputError


def _check_raster(raster, channels):
    raster = np.asarray(raster)
    if raster.ndim != 3 or raster.shape[2] != channels:
        raise InputError(f"expected an HxWx{channels} raster, got shape {raster.shape}")
    if raster.shape[0] == 0 or raster.shape[1] == 0:
        raise InputError(f"zero-dimension raster {raster.shape[1]}x{raster.shape[0]}")
    return np.ascontiguousarray(raster, dtype=np.uint8)


def write_png(rgb, path):
    """Lossless RGB PNG. Identical rasters give identical bytes."""
    Image.fromarray(_check_raster(rgb, 3)).save(path, format="PNG")


def write_rgba_png(rgba, path):
    Image.fromarray(_check_raster(rgba, 4)).save(path, format="PNG")


def read_png(path):
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"), dtype=np.uint8).copy()


def read_rgba_png(path):
    with Image.open(path) as image:
        return np.asarray(image.convert("RGBA"), dtype=np.uint8).copy()


def read_gray(path):
    """Single-channel raster from any Pillow-readable image."""
    with Image.open(path) as image:
        return np.asarray(image.convert("L"), dtype=np.uint8).copy()
