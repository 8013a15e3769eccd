"""Rigid and photometric particle augmentation. Nothing here ever rescales a particle."""
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage
from skimage.color import hsv2rgb, rgb2hsv

from ..exceptions import InputError, PlacementRejected
from ..geometry import BinaryMask

ROTATION_MODES = ("any", "right")
BLEED_WIDTH = 2


class AugmentConfig:
    """Which transforms run and how wide the HSV jitter ranges are.

    The colour defaults (hue 10 degrees, saturation and value 15%) are our own
    choice; treat them as tunable, not as calibrated values.
    """

    def __init__(
        self,
        flip=True,
        rotate=True,
        colorize=True,
        hue_range=10.0,
        sat_range=0.15,
        val_range=0.15,
        rotation_mode="any",
    ):
        if not 0 <= hue_range <= 180:
            raise InputError(f"hue_range must be in [0, 180], got {hue_range}")
        if not 0 <= sat_range < 1 or not 0 <= val_range < 1:
            raise InputError("sat_range and val_range must be in [0, 1)")
        if rotation_mode not in ROTATION_MODES:
            raise InputError(f"rotation_mode must be one of {ROTATION_MODES}")
        self.flip = flip
        self.rotate = rotate
        self.colorize = colorize
        self.hue_range = float(hue_range)
        self.sat_range = float(sat_range)
        self.val_range = float(val_range)
        self.rotation_mode = rotation_mode

    @classmethod
    def disabled(cls):
        return cls(flip=False, rotate=False, colorize=False)

    def to_dict(self):
        return {
            "flip": self.flip,
            "rotate": self.rotate,
            "colorize": self.colorize,
            "hue_range": self.hue_range,
            "sat_range": self.sat_range,
            "val_range": self.val_range,
            "rotation_mode": self.rotation_mode,
        }


@dataclass(frozen=True)
class AugmentParams:
    flip_h: bool = False
    flip_v: bool = False
    rotation_deg: float = 0.0
    hue_shift: float = 0.0
    sat_scale: float = 1.0
    val_scale: float = 1.0

    def is_geometric_identity(self):
        return not self.flip_h and not self.flip_v and self.rotation_deg == 0.0

    def is_photometric_identity(self):
        return self.hue_shift == 0.0 and self.sat_scale == 1.0 and self.val_scale == 1.0

    def to_dict(self):
        return asdict(self)


def sample_params(rng, cfg):
    # all six draws happen whatever the flags say
    flip_h = bool(rng.random() < 0.5)
    flip_v = bool(rng.random() < 0.5)
    if cfg.rotation_mode == "right":
        rotation = float(90 * rng.integers(0, 4))
    else:
        rotation = float(rng.uniform(0.0, 360.0))
    hue = float(rng.uniform(-cfg.hue_range, cfg.hue_range))
    sat = float(rng.uniform(1.0 - cfg.sat_range, 1.0 + cfg.sat_range))
    val = float(rng.uniform(1.0 - cfg.val_range, 1.0 + cfg.val_range))

    return AugmentParams(
        flip_h=flip_h and cfg.flip,
        flip_v=flip_v and cfg.flip,
        rotation_deg=rotation if cfg.rotate else 0.0,
        hue_shift=hue if cfg.colorize else 0.0,
        sat_scale=sat if cfg.colorize else 1.0,
        val_scale=val if cfg.colorize else 1.0,
    )


def _bleed(rgb, bits):
    """Fill a ``BLEED_WIDTH`` ring around the mask with the local mean in-mask colour."""
    if bits.all() or not bits.any():
        return rgb
    size = 2 * BLEED_WIDTH + 1
    ring = ndimage.binary_dilation(bits, iterations=BLEED_WIDTH) & ~bits
    weights = ndimage.uniform_filter(bits.astype(np.float32), size=size, mode="constant")[ring]
    out = rgb.copy()
    for channel in range(rgb.shape[2]):
        inside = np.where(bits, rgb[..., channel], 0).astype(np.float32)
        sums = ndimage.uniform_filter(inside, size=size, mode="constant")[ring]
        out[..., channel][ring] = np.clip(np.rint(sums / weights), 0, 255).astype(np.uint8)
    return out


def _rotate(raster, degrees, order):
    quarter, remainder = divmod(degrees, 90.0)
    if remainder == 0.0:
        return np.rot90(raster, int(quarter) % 4)
    if order == 0:
        return ndimage.rotate(
            raster.astype(np.uint8), degrees, axes=(1, 0), reshape=True, order=0, mode="constant", cval=0
        ).astype(bool)
    channels = [
        ndimage.rotate(
            raster[..., channel].astype(np.float32), degrees, axes=(1, 0), reshape=True, order=1, mode="nearest"
        )
        for channel in range(raster.shape[2])
    ]
    return np.clip(np.rint(np.dstack(channels)), 0, 255).astype(np.uint8)


def _geometric(raster, params, order):
    if params.flip_h:
        raster = np.fliplr(raster)
    if params.flip_v:
        raster = np.flipud(raster)
    if params.rotation_deg != 0.0:
        raster = _rotate(raster, params.rotation_deg, order)
    return raster


def _colorize(rgb, bits, params):
    """HSV jitter of the pixels under ``bits``; everything else is left as is."""
    if not bits.any():
        return rgb
    pixels = rgb[bits].reshape(-1, 1, 3).astype(np.float32) / 255.0
    hsv = rgb2hsv(pixels)
    hsv[..., 0] = np.mod(hsv[..., 0] + params.hue_shift / 360.0, 1.0)
    hsv[..., 1] = np.clip(hsv[..., 1] * params.sat_scale, 0.0, 1.0)
    hsv[..., 2] = np.clip(hsv[..., 2] * params.val_scale, 0.0, 1.0)
    out = rgb.copy()
    out[bits] = np.clip(np.rint(hsv2rgb(hsv) * 255.0), 0, 255).astype(np.uint8).reshape(-1, 3)
    return out


def transform_mask(mask, params):
    """Mask half of ``apply``: nearest-neighbour, depends on the geometric fields only."""
    if params.is_geometric_identity():
        return mask
    return BinaryMask(_geometric(mask.bits, params, order=0))


def apply(asset, params):
    """Augmented (RGBA sprite, mask). Identity params return the asset's own pixels."""
    if params.is_geometric_identity() and params.is_photometric_identity():
        return asset.sprite.copy(), asset.mask

    mask = transform_mask(asset.mask, params)
    rgb = asset.rgb
    if params.rotation_deg % 90.0 != 0.0:
        rgb = _bleed(rgb, asset.mask.bits)
    rgb = _geometric(rgb, params, order=1)
    if not params.is_photometric_identity():
        rgb = _colorize(rgb, mask.bits, params)

    bits = mask.bits
    rgb = np.where(bits[..., None], rgb, 0).astype(np.uint8)
    alpha = np.where(bits, 255, 0).astype(np.uint8)
    return np.dstack([rgb, alpha]), mask


def _trim_box(mask, asset_id):
    if mask.is_empty():
        raise PlacementRejected(f"augmentation emptied the mask of {asset_id}")
    return mask.bbox()


def augmented_mask(asset, params):
    """Transformed mask trimmed to its bounding box; what placement works with."""
    mask = transform_mask(asset.mask, params)
    x0, y0, x1, y1 = _trim_box(mask, asset.asset_id)
    return BinaryMask(mask.bits[y0:y1, x0:x1])


def augmented_cutout(asset, params):
    """``apply`` trimmed the same way as ``augmented_mask``; what gets painted."""
    sprite, mask = apply(asset, params)
    x0, y0, x1, y1 = _trim_box(mask, asset.asset_id)
    return sprite[y0:y1, x0:x1], BinaryMask(mask.bits[y0:y1, x0:x1])
