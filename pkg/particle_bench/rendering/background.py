"""Conveyor-belt backgrounds: a texture tiled toroidally, or a flat colour."""
import re
from pathlib import Path

import numpy as np

from ..exceptions import InputError
from .images import read_png

DEFAULT_BELT_COLOR = (58, 58, 62)
HEX_COLOR_REGEX = re.compile(r"\A#([0-9a-fA-F]{6})\Z")


class Background:
    def __init__(self, background_id, texture=None, color=DEFAULT_BELT_COLOR):
        if texture is not None:
            texture = np.asarray(texture, dtype=np.uint8)
            if texture.ndim != 3 or texture.shape[2] != 3 or 0 in texture.shape:
                raise InputError(f"background texture must be HxWx3, got {texture.shape}")
        self.background_id = background_id
        self.texture = texture
        self.color = tuple(int(c) for c in color)

    @property
    def tiling(self):
        return "flat" if self.texture is None else "wrap"

    def render(self, width, height):
        if self.texture is None:
            canvas = np.empty((height, width, 3), dtype=np.uint8)
            canvas[...] = self.color
            return canvas
        rows = np.arange(height) % self.texture.shape[0]
        cols = np.arange(width) % self.texture.shape[1]
        return self.texture[np.ix_(rows, cols)]

    def __repr__(self):
        return f"<Background(background_id='{self.background_id}', tiling='{self.tiling}')>"


def flat_background(color=DEFAULT_BELT_COLOR):
    return Background("flat-" + "".join(f"{c:02x}" for c in color), color=color)


def load_background(ref=None, base_dir=None):
    """``ref`` is None (default belt grey), ``#rrggbb``, or a path to an image."""
    if ref is None:
        return flat_background()
    match = HEX_COLOR_REGEX.match(ref)
    if match:
        value = match.group(1)
        return flat_background(tuple(int(value[i : i + 2], 16) for i in (0, 2, 4)))

    path = Path(ref)
    if not path.is_absolute() and base_dir:
        path = Path(base_dir) / path
    if not path.exists():
        raise InputError(f"background not found: {path}")
    return Background(path.stem, texture=read_png(path))
