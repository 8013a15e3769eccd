import hashlib

import numpy as np

from ..exceptions import InputError

DEFAULT_ALPHA = 0.5


def instance_color(instance_id):
    """Stable RGB colour for an instance id, the same in every image."""
    digest = hashlib.blake2b(int(instance_id).to_bytes(4, "big"), digest_size=3).digest()
    # channels land in [64, 255]
    return tuple(64 + (byte * 191) // 255 for byte in digest)


def palette(ids):
    """(max_id + 1) x 3 lookup table; row 0 is unused background."""
    top = int(max(ids, default=0))
    table = np.zeros((top + 1, 3), dtype=np.uint8)
    for instance_id in ids:
        table[instance_id] = instance_color(instance_id)
    return table


def render_overlay(rgb, graymap, alpha=DEFAULT_ALPHA):
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.shape[:2] != graymap.ids.shape:
        raise InputError(
            f"image is {rgb.shape[1]}x{rgb.shape[0]} but graymap is {graymap.width}x{graymap.height}"
        )
    if not 0 <= alpha <= 1:
        raise InputError(f"alpha must be in [0, 1], got {alpha}")

    out = rgb.copy()
    ids = graymap.ids
    covered = ids > 0
    if not covered.any():
        return out

    colors = palette(sorted(graymap.id_set()))[ids[covered]]
    blended = (1.0 - alpha) * rgb[covered].astype(np.float64) + alpha * colors
    out[covered] = np.clip(np.rint(blended), 0, 255).astype(np.uint8)
    return out
