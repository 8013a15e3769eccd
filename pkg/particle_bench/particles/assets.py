import hashlib

import numpy as np

from ..exceptions import DegenerateParticleError, InputError
from ..geometry import BinaryMask, farthest_pair, largest_component, morph_refine
from .sieve import classify_size

CROP_MARGIN = 1


class ParticleAsset:
    """A refined particle cutout: RGBA sprite (alpha is coverage), mask, size and sieve class."""

    def __init__(self, asset_id, sprite, mask, size_mm, size_class, provenance=""):
        sprite = np.asarray(sprite, dtype=np.uint8)
        if sprite.ndim != 3 or sprite.shape[2] != 4:
            raise InputError(f"sprite must be HxWx4, got {sprite.shape}")
        if sprite.shape[:2] != mask.shape:
            raise InputError(
                f"sprite {sprite.shape[:2]} and mask {mask.shape} dimensions differ"
            )
        if not np.array_equal(sprite[..., 3] > 0, mask.bits):
            raise InputError(f"sprite coverage of {asset_id} does not match its mask")
        self.asset_id = asset_id
        self.sprite = sprite
        self.mask = mask
        self.size_mm = float(size_mm)
        self.size_class = size_class
        self.provenance = provenance

    @property
    def rgb(self):
        return self.sprite[..., :3]

    @property
    def width(self):
        return self.mask.width

    @property
    def height(self):
        return self.mask.height

    def __eq__(self, other):
        if not isinstance(other, ParticleAsset):
            return NotImplemented
        return (
            self.asset_id == other.asset_id
            and self.size_mm == other.size_mm
            and self.size_class == other.size_class
            and self.provenance == other.provenance
            and self.mask == other.mask
            and np.array_equal(self.sprite, other.sprite)
        )

    def __repr__(self):
        return (
            f"<ParticleAsset(asset_id='{self.asset_id}', size_mm={self.size_mm:.2f}, "
            f"class={self.size_class.index})>"
        )


def sprite_from(rgb, mask):
    alpha = np.where(mask.bits, 255, 0).astype(np.uint8)
    return np.dstack([np.asarray(rgb, dtype=np.uint8), alpha])


def content_id(rgb, mask):
    digest = hashlib.blake2b(digest_size=8)
    digest.update(np.asarray(mask.shape, dtype=np.int64).tobytes())
    digest.update(np.packbits(mask.bits).tobytes())
    digest.update(np.ascontiguousarray(rgb).tobytes())
    return digest.hexdigest()


def crop_to_mask(rgb, mask, margin=CROP_MARGIN):
    """Crop to the mask bounding box plus a margin, zero-padding past the raster edge."""
    x0, y0, x1, y1 = mask.bbox()
    height, width = y1 - y0 + 2 * margin, x1 - x0 + 2 * margin
    out_rgb = np.zeros((height, width, 3), dtype=np.uint8)
    out_bits = np.zeros((height, width), dtype=bool)

    sx0, sy0 = max(x0 - margin, 0), max(y0 - margin, 0)
    sx1, sy1 = min(x1 + margin, mask.width), min(y1 + margin, mask.height)
    dx, dy = sx0 - (x0 - margin), sy0 - (y0 - margin)
    out_rgb[dy : dy + sy1 - sy0, dx : dx + sx1 - sx0] = rgb[sy0:sy1, sx0:sx1]
    out_bits[dy : dy + sy1 - sy0, dx : dx + sx1 - sx0] = mask.bits[sy0:sy1, sx0:sx1]
    return out_rgb, BinaryMask(out_bits)


def import_asset(cutout, raw_mask, mm_per_px, refine=None, asset_id=None, provenance=""):
    cutout = np.asarray(cutout, dtype=np.uint8)
    if cutout.ndim != 3 or cutout.shape[2] not in (3, 4):
        raise InputError(f"cutout must be an RGB or RGBA raster, got {cutout.shape}")
    if cutout.shape[:2] != raw_mask.shape:
        raise InputError(
            f"cutout {cutout.shape[:2]} and mask {raw_mask.shape} dimensions differ"
        )
    if not mm_per_px > 0:
        raise InputError(f"mm_per_px must be positive, got {mm_per_px}")

    refined = largest_component(morph_refine(raw_mask, refine))
    if refined.is_empty():
        raise DegenerateParticleError(provenance or asset_id)

    rgb, mask = crop_to_mask(cutout[..., :3], refined)
    size_mm = farthest_pair(mask) * mm_per_px
    size_class = classify_size(size_mm)

    return ParticleAsset(
        asset_id=asset_id or content_id(rgb, mask),
        sprite=sprite_from(rgb, mask),
        mask=mask,
        size_mm=size_mm,
        size_class=size_class,
        provenance=provenance,
    )
