import numpy as np
from scipy import ndimage
from skimage.measure import label
from skimage.morphology import disk

from ..exceptions import GeometryError

REFINE_OPS = ("erode", "dilate", "open", "close", "fill_holes", "drop_small")


class BinaryMask:
    """Immutable row-major boolean raster."""

    __slots__ = ("_bits",)

    def __init__(self, bits):
        bits = np.array(bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise GeometryError(f"mask must be 2-D, got shape {bits.shape}")
        if bits.shape[0] == 0 or bits.shape[1] == 0:
            raise GeometryError(f"mask dimensions must be positive, got {bits.shape}")
        bits.flags.writeable = False
        self._bits = bits

    @classmethod
    def empty(cls, width, height):
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def bits(self):
        return self._bits

    @property
    def width(self):
        return self._bits.shape[1]

    @property
    def height(self):
        return self._bits.shape[0]

    @property
    def shape(self):
        return self._bits.shape

    @property
    def area(self):
        return int(np.count_nonzero(self._bits))

    def is_empty(self):
        return not self._bits.any()

    def bbox(self):
        """(x0, y0, x1, y1), exclusive upper corner; None for an empty mask."""
        rows = np.flatnonzero(self._bits.any(axis=1))
        if rows.size == 0:
            return None
        cols = np.flatnonzero(self._bits.any(axis=0))
        return int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self):
        return f"<BinaryMask(width={self.width}, height={self.height}, area={self.area})>"


class RefineParams:
    """Morphological refinement: a kernel radius and an ordered op sequence.

    ``drop_small`` removes components smaller than
    ``max(min_component_area, min_component_fraction * largest)``.
    """

    def __init__(
        self,
        radius=1,
        steps=("close", "fill_holes", "drop_small"),
        min_component_area=9,
        min_component_fraction=0.005,
    ):
        if radius < 1:
            raise GeometryError(f"kernel radius must be >= 1, got {radius}")
        unknown = [step for step in steps if step not in REFINE_OPS]
        if unknown:
            raise GeometryError(f"unknown refinement steps: {', '.join(unknown)}")
        self.radius = int(radius)
        self.steps = tuple(steps)
        self.min_component_area = int(min_component_area)
        self.min_component_fraction = float(min_component_fraction)

    def to_dict(self):
        return {
            "radius": self.radius,
            "steps": list(self.steps),
            "min_component_area": self.min_component_area,
            "min_component_fraction": self.min_component_fraction,
        }

    def __repr__(self):
        return f"<RefineParams(radius={self.radius}, steps={self.steps})>"


def structuring_element(radius):
    # strict_radius=False extends the disc by half a pixel, so radius 1 is the full 3x3 block
    return disk(radius, strict_radius=False).astype(bool)


def connected_components(mask, connectivity=8):
    if connectivity not in (4, 8):
        raise GeometryError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, count = label(
        mask.bits, connectivity=1 if connectivity == 4 else 2, return_num=True
    )
    return [BinaryMask(labels == index) for index in range(1, count + 1)]


def component_areas(bits, connectivity=8):
    labels = label(bits, connectivity=1 if connectivity == 4 else 2)
    return labels, np.bincount(labels.ravel())


def largest_component(mask, connectivity=8):
    if mask.is_empty():
        return mask
    labels, areas = component_areas(mask.bits, connectivity)
    areas[0] = 0
    return BinaryMask(labels == int(np.argmax(areas)))


def _erode(bits, radius):
    footprint = structuring_element(radius)
    padded = np.pad(bits, radius)
    return ndimage.binary_erosion(padded, structure=footprint)[radius:-radius, radius:-radius]


def _dilate(bits, radius):
    footprint = structuring_element(radius)
    padded = np.pad(bits, radius)
    return ndimage.binary_dilation(padded, structure=footprint)[radius:-radius, radius:-radius]


def _close(bits, radius):
    footprint = structuring_element(radius)
    # room for the dilation so closing stays extensive at the raster edge
    pad = 2 * radius
    padded = np.pad(bits, pad)
    closed = ndimage.binary_erosion(
        ndimage.binary_dilation(padded, structure=footprint), structure=footprint
    )
    return closed[pad:-pad, pad:-pad]


def _drop_small(bits, params):
    labels, areas = component_areas(bits)
    areas[0] = 0
    if areas.max(initial=0) == 0:
        return bits
    threshold = max(params.min_component_area, params.min_component_fraction * areas.max())
    keep = areas >= threshold
    keep[0] = False
    return keep[labels]


def morph_refine(mask, params=None):
    params = params or RefineParams()
    bits = mask.bits
    for step in params.steps:
        if step == "erode":
            bits = _erode(bits, params.radius)
        elif step == "dilate":
            bits = _dilate(bits, params.radius)
        elif step == "open":
            bits = _dilate(_erode(bits, params.radius), params.radius)
        elif step == "close":
            bits = _close(bits, params.radius)
        elif step == "fill_holes":
            bits = ndimage.binary_fill_holes(bits)
        elif step == "drop_small":
            bits = _drop_small(bits, params)
    return BinaryMask(bits)


def mask_iou(a, b):
    if a.shape != b.shape:
        raise GeometryError(f"mask dimensions differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a.bits | b.bits)
    if union == 0:
        return 0.0
    return np.count_nonzero(a.bits & b.bits) / union
