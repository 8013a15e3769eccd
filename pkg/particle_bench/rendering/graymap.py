"""16-bit instance-ID graymaps and their binary PGM encoding."""
import re

import numpy as np

from ..exceptions import GraymapOverflowError, InputError
from ..geometry import BinaryMask
from .exceptions import MalformedHeaderError, TruncatedPayloadError, UnsupportedMaxvalError

MAXVAL = 65535
HEADER_REGEX = re.compile(rb"\AP5\s(\d+)\s(\d+)\s(\d+)\s")
MAGIC_REGEX = re.compile(rb"\AP5\s")


class GraymapMask:
    """Row-major instance-ID raster, 0 is background."""

    def __init__(self, ids):
        ids = np.array(ids, dtype=np.uint16, copy=True)
        if ids.ndim != 2 or 0 in ids.shape:
            raise InputError(f"graymap must be a non-empty 2-D raster, got {ids.shape}")
        ids.flags.writeable = False
        self.ids = ids

    @property
    def width(self):
        return self.ids.shape[1]

    @property
    def height(self):
        return self.ids.shape[0]

    def id_set(self):
        present = np.unique(self.ids)
        return {int(i) for i in present if i != 0}

    def pixel_counts(self):
        """{instance_id: pixel count} for every id present."""
        counts = np.bincount(self.ids.ravel())
        return {int(i): int(c) for i, c in enumerate(counts) if i != 0 and c}

    def instance_mask(self, instance_id):
        return BinaryMask(self.ids == instance_id)

    @classmethod
    def from_binary(cls, mask):
        return cls(mask.bits.astype(np.uint16))

    def __eq__(self, other):
        if not isinstance(other, GraymapMask):
            return NotImplemented
        return np.array_equal(self.ids, other.ids)

    def __repr__(self):
        return f"<GraymapMask(width={self.width}, height={self.height})>"


def rasterize_graymap(scene):
    if len(scene.instances) > MAXVAL:
        raise GraymapOverflowError(len(scene.instances))

    ids = np.zeros((scene.height, scene.width), dtype=np.uint16)
    for instance in scene.instances:
        window = ids[instance.window()]
        window[instance.mask.bits] = instance.instance_id
    return GraymapMask(ids)


def encode_pgm(graymap):
    header = f"P5\n{graymap.width} {graymap.height}\n{MAXVAL}\n".encode("ascii")
    return header + graymap.ids.astype(">u2").tobytes()


def decode_pgm(data, path=None):
    if not MAGIC_REGEX.match(data):
        raise MalformedHeaderError(path, "missing P5 magic")
    match = HEADER_REGEX.match(data)
    if not match:
        raise MalformedHeaderError(path, "expected width, height and maxval")

    width, height, maxval = (int(group) for group in match.groups())
    if width == 0 or height == 0:
        raise MalformedHeaderError(path, f"zero dimension {width}x{height}")
    if maxval != MAXVAL:
        raise UnsupportedMaxvalError(maxval, path)

    payload = data[match.end() :]
    expected = width * height * 2
    if len(payload) < expected:
        raise TruncatedPayloadError(expected, len(payload), path)
    if len(payload) > expected:
        raise MalformedHeaderError(path, f"{len(payload) - expected} trailing bytes")

    ids = np.frombuffer(payload, dtype=">u2").reshape(height, width)
    return GraymapMask(ids.astype(np.uint16))


def write_pgm(graymap, path):
    with open(path, "wb") as f:
        f.write(encode_pgm(graymap))


def read_pgm(path):
    with open(path, "rb") as f:
        return decode_pgm(f.read(), path=str(path))
