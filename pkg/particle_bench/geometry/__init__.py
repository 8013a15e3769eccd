"""Binary-mask primitives shared by every other module."""
from .masks import (
    BinaryMask,
    RefineParams,
    connected_components,
    largest_component,
    mask_iou,
    morph_refine,
)
from .hull import PixelPoint, convex_hull, farthest_pair, hull_area
