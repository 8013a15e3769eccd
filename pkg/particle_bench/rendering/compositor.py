import numpy as np
from scipy import ndimage

from ..scenes.augment import augmented_cutout
from .exceptions import MetadataInvariantError


def _paint(window, sprite, bits, feather):
    under = window.copy() if feather else None
    window[bits] = sprite[..., :3][bits]
    if feather:
        ring = bits & ~ndimage.binary_erosion(bits, border_value=0)
        blended = (under[ring].astype(np.uint16) + window[ring]) // 2
        window[ring] = blended.astype(np.uint8)


def composite_rgb(scene, background, catalog, feather=False):
    """Background first, then every instance in z-order with hard mask compositing.

    ``feather`` averages each instance's 1-px rim with what it covers. It is
    off by default; pixels outside every mask always keep the background value.
    """
    canvas = background.render(scene.width, scene.height).copy()
    for instance in sorted(scene.instances, key=lambda i: i.z):
        asset = catalog.get(instance.asset_id)
        sprite, mask = augmented_cutout(asset, instance.augment)
        if mask.shape != instance.mask.shape:
            raise MetadataInvariantError(
                f"augmented {instance.asset_id} is {mask.shape}, scene expects {instance.mask.shape}",
                instance.instance_id,
            )
        _paint(canvas[instance.window()], sprite, mask.bits, feather)
    return canvas
