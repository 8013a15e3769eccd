"""Stage-specific placement of augmented particles on a canvas.

L1 throws darts until the budget is met or the canvas saturates, rejecting any
overlap. L2 places instances in z-order and accepts a candidate only while
every earlier instance keeps at least ``visibility_floor`` of its area. L3
applies the L2 rule layer by layer, bottom-up, letting upper layers cover lower
ones without bound.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np
from loguru import logger
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..exceptions import PlacementRejected
from ..geometry import BinaryMask
from ..particles.sieve import CLASS_INDICES, LAYER_COUNT, classes_in_layer, size_class
from .augment import AugmentParams, augmented_mask, sample_params


@dataclass
class PlacedInstance:
    instance_id: int
    asset_id: str
    size_class: int
    augment: AugmentParams
    x: int
    y: int
    layer: int
    z: int
    mask: BinaryMask
    visible_area: int = 0
    layer_visible_area: int = 0

    @property
    def amodal_area(self):
        return self.mask.area

    @property
    def visibility(self):
        return self.visible_area / self.amodal_area

    @property
    def layer_visibility(self):
        return self.layer_visible_area / self.amodal_area

    def bbox(self):
        """(x0, y0, x1, y1) on the canvas, exclusive upper corner."""
        return self.x, self.y, self.x + self.mask.width, self.y + self.mask.height

    def window(self):
        return slice(self.y, self.y + self.mask.height), slice(self.x, self.x + self.mask.width)

    def canvas_mask(self, width, height):
        bits = np.zeros((height, width), dtype=bool)
        bits[self.window()] = self.mask.bits
        return BinaryMask(bits)


@dataclass
class Scene:
    width: int
    height: int
    stage: str
    seed: int
    instances: list = field(default_factory=list)
    planned_counts: list = field(default_factory=lambda: [0] * len(CLASS_INDICES))
    shortfall: list = field(default_factory=lambda: [0] * len(CLASS_INDICES))
    background_id: str = ""

    @property
    def psd_histogram(self):
        histogram = [0] * len(CLASS_INDICES)
        for instance in self.instances:
            histogram[instance.size_class - 1] += 1
        return histogram

    def __len__(self):
        return len(self.instances)

    def __repr__(self):
        return (
            f"<Scene(stage='{self.stage}', {self.width}x{self.height}, "
            f"instances={len(self.instances)})>"
        )


class SceneBuilder:
    """Owner raster plus running visible areas for a scene under construction.

    ``place`` either commits a mask at (x, y) or raises PlacementRejected and
    leaves the state untouched.
    """

    def __init__(self, width, height, visibility_floor=1.0, disjoint=False):
        self.width = width
        self.height = height
        self.visibility_floor = visibility_floor
        self.disjoint = disjoint
        self.owner = np.zeros((height, width), dtype=np.int32)
        self.amodal = [0]
        self.visible = [0]
        self.layer_visible = [0]
        self.layers = [-1]
        self.current_layer = 0

    @property
    def count(self):
        return len(self.amodal) - 1

    def fits(self, mask):
        return mask.width <= self.width and mask.height <= self.height

    def _occlusion(self, mask, x, y):
        window = self.owner[y : y + mask.height, x : x + mask.width]
        covered = window[mask.bits]
        counts = np.bincount(covered[covered > 0])
        ids = np.flatnonzero(counts)
        return ids, counts[ids]

    def check(self, mask, x, y):
        """{instance_id: pixels lost} if placing ``mask`` at (x, y) is allowed."""
        if x < 0 or y < 0 or x + mask.width > self.width or y + mask.height > self.height:
            raise PlacementRejected("outside the canvas")
        ids, lost = self._occlusion(mask, x, y)
        if self.disjoint and ids.size:
            raise PlacementRejected(f"overlaps {ids.size} placed instances")

        for instance_id, pixels in zip(ids.tolist(), lost.tolist()):
            if self.layers[instance_id] != self.current_layer:
                continue
            remaining = (self.visible[instance_id] - pixels) / self.amodal[instance_id]
            if remaining < self.visibility_floor:
                raise PlacementRejected(
                    f"instance {instance_id} would drop to visibility {remaining:.3f}"
                )
        return dict(zip(ids.tolist(), lost.tolist()))

    def place(self, mask, x, y):
        losses = self.check(mask, x, y)
        instance_id = self.count + 1
        window = self.owner[y : y + mask.height, x : x + mask.width]
        window[mask.bits] = instance_id
        for occluded, pixels in losses.items():
            self.visible[occluded] -= pixels
        self.amodal.append(mask.area)
        self.visible.append(mask.area)
        self.layer_visible.append(0)
        self.layers.append(self.current_layer)
        return instance_id

    def finish_layer(self):
        """Freeze within-layer visible areas of the current layer and move one layer up."""
        for instance_id, layer in enumerate(self.layers):
            if layer == self.current_layer:
                self.layer_visible[instance_id] = self.visible[instance_id]
        self.current_layer += 1


def _random_anchor(builder, mask, rng):
    if not builder.fits(mask):
        raise PlacementRejected("larger than the canvas")
    x = int(rng.integers(0, builder.width - mask.width + 1))
    y = int(rng.integers(0, builder.height - mask.height + 1))
    return x, y


def _new_instance(builder, asset, params, mask, x, y):
    instance_id = builder.place(mask, x, y)
    return PlacedInstance(
        instance_id=instance_id,
        asset_id=asset.asset_id,
        size_class=asset.size_class.index,
        augment=params,
        x=x,
        y=y,
        layer=builder.current_layer,
        z=instance_id - 1,
        mask=mask,
    )


def _finalize(scene, builder):
    builder.finish_layer()
    for instance in scene.instances:
        instance.visible_area = builder.visible[instance.instance_id]
        instance.layer_visible_area = builder.layer_visible[instance.instance_id]
    return scene


def _single_class(counts, stage):
    index = stage.classes[0]
    budget = int(counts[index - 1])
    ignored = sum(counts) - budget
    if ignored:
        logger.warning(
            "{stage} is single-class; ignoring {ignored} planned instances outside class {index}",
            stage=stage.stage,
            ignored=ignored,
            index=index,
        )
    planned = [0] * len(CLASS_INDICES)
    planned[index - 1] = budget
    return index, budget, planned


def compose_l1(catalog, counts, stage, seeds, width, height, augment_cfg, background_id=""):
    index, budget, planned = _single_class(counts, stage)
    pool = catalog.pool(index)
    builder = SceneBuilder(width, height, disjoint=True)
    scene = Scene(width, height, "L1", seeds.image_seed, planned_counts=planned, background_id=background_id)
    darts = itertools.count(1)

    def throw():
        rng = seeds.instance_rng(next(darts))
        asset = pool[int(rng.integers(len(pool)))]
        params = sample_params(rng, augment_cfg)
        mask = augmented_mask(asset, params)
        x, y = _random_anchor(builder, mask, rng)
        return _new_instance(builder, asset, params, mask, x, y)

    while len(scene.instances) < budget:
        try:
            for attempt in Retrying(
                stop=stop_after_attempt(stage.l1_saturation_patience),
                retry=retry_if_exception_type(PlacementRejected),
                reraise=True,
            ):
                with attempt:
                    instance = throw()
        except PlacementRejected:
            logger.debug(
                "Canvas saturated after {placed} instances", placed=len(scene.instances)
            )
            break
        scene.instances.append(instance)

    scene.shortfall[index - 1] = budget - len(scene.instances)
    return _finalize(scene, builder)


def _place_with_retries(builder, pool, rng, stage, augment_cfg):
    asset = pool[int(rng.integers(len(pool)))]
    params = sample_params(rng, augment_cfg)
    mask = augmented_mask(asset, params)

    for attempt in Retrying(
        stop=stop_after_attempt(stage.max_place_attempts),
        retry=retry_if_exception_type(PlacementRejected),
        reraise=True,
    ):
        with attempt:
            x, y = _random_anchor(builder, mask, rng)
            return _new_instance(builder, asset, params, mask, x, y)


def _compose_layers(catalog, plan, stage, seeds, width, height, augment_cfg, scene):
    """Place ``plan`` ({layer: [class index, ...] in z-order}) bottom-up."""
    builder = SceneBuilder(width, height, visibility_floor=stage.visibility_floor)
    slot = 0
    for layer in range(LAYER_COUNT):
        for index in plan.get(layer, []):
            slot += 1
            rng = seeds.instance_rng(slot)
            try:
                instance = _place_with_retries(
                    builder, catalog.pool(index), rng, stage, augment_cfg
                )
            except PlacementRejected as e:
                logger.debug("Skipping slot {slot}: {reason}", slot=slot, reason=e.reason)
                scene.shortfall[index - 1] += 1
                continue
            scene.instances.append(instance)
        if layer < LAYER_COUNT - 1:
            builder.finish_layer()
    return _finalize(scene, builder)


def compose_l2(catalog, counts, stage, seeds, width, height, augment_cfg, background_id=""):
    index, budget, planned = _single_class(counts, stage)
    catalog.pool(index)
    scene = Scene(width, height, "L2", seeds.image_seed, planned_counts=planned, background_id=background_id)
    plan = {size_class(index).layer: [index] * budget}
    # a single-class scene is one layer, so the L2 rule covers every pair
    return _compose_layers(catalog, plan, stage, seeds, width, height, augment_cfg, scene)


def layer_plan(counts, rng):
    """{layer: shuffled class indices} so classes sharing a layer interleave in z."""
    plan = {}
    for layer in range(LAYER_COUNT):
        members = [index for index in classes_in_layer(layer) for _ in range(int(counts[index - 1]))]
        if members:
            plan[layer] = [members[i] for i in rng.permutation(len(members))]
    return plan


def compose_l3(catalog, counts, stage, seeds, width, height, augment_cfg, background_id=""):
    for index in CLASS_INDICES:
        if counts[index - 1]:
            catalog.pool(index)
    scene = Scene(
        width,
        height,
        "L3",
        seeds.image_seed,
        planned_counts=[int(c) for c in counts],
        background_id=background_id,
    )
    plan = layer_plan(counts, seeds.plan_rng())
    return _compose_layers(catalog, plan, stage, seeds, width, height, augment_cfg, scene)


COMPOSERS = {"L1": compose_l1, "L2": compose_l2, "L3": compose_l3}


def compose_scene(catalog, counts, stage, seeds, width, height, augment_cfg, background_id=""):
    scene = COMPOSERS[stage.stage](
        catalog, counts, stage, seeds, width, height, augment_cfg, background_id=background_id
    )
    logger.debug(
        "Composed {scene} with shortfall {shortfall}",
        scene=repr(scene),
        shortfall=sum(scene.shortfall),
    )
    return scene


def repaint_visible_areas(instances, width, height, max_layer=None):
    """{instance_id: visible pixels} by painting amodal masks in z-order from scratch."""
    ids = np.zeros((height, width), dtype=np.int32)
    for instance in sorted(instances, key=lambda i: i.z):
        if max_layer is not None and instance.layer > max_layer:
            continue
        window = ids[instance.window()]
        window[instance.mask.bits] = instance.instance_id
    counts = np.bincount(ids.ravel())
    return {
        instance.instance_id: int(counts[instance.instance_id]) if instance.instance_id < counts.size else 0
        for instance in instances
        if max_layer is None or instance.layer <= max_layer
    }
