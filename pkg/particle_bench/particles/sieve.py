"""Sieve size classes for recycled aggregates, 4 mm to 63 mm."""
import bisect
from dataclasses import dataclass

from ..exceptions import SieveRangeError

SIEVE_BOUNDS_MM = (4.0, 5.6, 8.0, 11.2, 16.0, 22.4, 35.0, 45.0, 63.0)
CLASS_LAYERS = {1: 0, 2: 0, 3: 0, 4: 1, 5: 1, 6: 2, 7: 3, 8: 4}
CLASS_INDICES = tuple(range(1, len(SIEVE_BOUNDS_MM)))
LAYER_COUNT = max(CLASS_LAYERS.values()) + 1


@dataclass(frozen=True)
class SizeClass:
    index: int
    min_mm: float
    max_mm: float
    layer: int

    def contains(self, size_mm):
        if self.index == CLASS_INDICES[-1]:
            return self.min_mm <= size_mm <= self.max_mm
        return self.min_mm <= size_mm < self.max_mm

    def __str__(self):
        return f"class {self.index} [{self.min_mm}, {self.max_mm})"


SIZE_CLASSES = {
    index: SizeClass(
        index=index,
        min_mm=SIEVE_BOUNDS_MM[index - 1],
        max_mm=SIEVE_BOUNDS_MM[index],
        layer=CLASS_LAYERS[index],
    )
    for index in CLASS_INDICES
}


def size_class(index):
    return SIZE_CLASSES[index]


def classify_size(size_mm):
    """Half-open [min, max) intervals, with 63.0 mm falling into class 8."""
    if not SIEVE_BOUNDS_MM[0] <= size_mm <= SIEVE_BOUNDS_MM[-1]:
        raise SieveRangeError(size_mm)
    if size_mm == SIEVE_BOUNDS_MM[-1]:
        return SIZE_CLASSES[CLASS_INDICES[-1]]
    return SIZE_CLASSES[bisect.bisect_right(SIEVE_BOUNDS_MM, size_mm)]


def classes_in_layer(layer):
    return [index for index, class_layer in CLASS_LAYERS.items() if class_layer == layer]
