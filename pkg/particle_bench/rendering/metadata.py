"""Per-image metadata documents.

One JSON document per image: canvas, seed, planned vs realized class counts
and one entry per instance with its amodal mask as canvas-frame runs.
"""
import json
from dataclasses import asdict, dataclass, field

from marshmallow import Schema, ValidationError, fields, post_load, validate, validates_schema

from ..particles.sieve import CLASS_INDICES, LAYER_COUNT
from ..scenes.augment import AugmentParams
from ..util import flatten_messages, write_json
from .exceptions import MetadataInvariantError, MetadataSchemaError
from .rle import decode_runs, encode_placed, run_area, run_bbox

STAGES = ("L1", "L2", "L3")
CLASS_VECTOR = validate.Length(equal=len(CLASS_INDICES))


@dataclass
class InstanceRecord:
    instance_id: int
    asset_id: str
    size_class: int
    layer: int
    z: int
    bbox: list
    amodal_area: int
    visible_area: int
    visibility: float
    layer_visible_area: int
    layer_visibility: float
    augment: AugmentParams
    amodal_rle: list

    def amodal_mask(self, width, height):
        return decode_runs(self.amodal_rle, width, height)


@dataclass
class ImageRecord:
    image_id: str
    stage: str
    seed: int
    width: int
    height: int
    mm_per_px: float
    background_id: str
    planned_counts: list
    psd_histogram: list
    shortfall: list
    instances: list = field(default_factory=list)
    paired_with: str = None

    def instance_ids(self):
        return [instance.instance_id for instance in self.instances]


class AugmentSchema(Schema):
    flip_h = fields.Bool(required=True)
    flip_v = fields.Bool(required=True)
    rotation_deg = fields.Float(required=True, validate=validate.Range(min=0, max=360, max_inclusive=False))
    hue_shift = fields.Float(required=True, validate=validate.Range(min=-180, max=180))
    sat_scale = fields.Float(required=True, validate=validate.Range(min=0))
    val_scale = fields.Float(required=True, validate=validate.Range(min=0))

    @post_load
    def make_params(self, data, **kwargs):
        return AugmentParams(**data)


class RunLengthSchema(Schema):
    size = fields.List(fields.Int(validate=validate.Range(min=1)), required=True, validate=validate.Length(equal=2))
    runs = fields.List(
        fields.List(fields.Int(validate=validate.Range(min=0)), validate=validate.Length(equal=2)),
        required=True,
    )

    @validates_schema(skip_on_field_errors=True)
    def check_runs(self, data, **kwargs):
        height, width = data["size"]
        end = 0
        for start, length in data["runs"]:
            if start < end:
                raise ValidationError(f"run at {start} overlaps or precedes the previous run", "runs")
            end = start + length
            if end > height * width:
                raise ValidationError(f"run [{start}, {length}] ends past the {width}x{height} canvas", "runs")


class InstanceSchema(Schema):
    instance_id = fields.Int(required=True, validate=validate.Range(min=1, max=65535))
    asset_id = fields.String(required=True)
    size_class = fields.Int(required=True, validate=validate.OneOf(CLASS_INDICES))
    layer = fields.Int(required=True, validate=validate.Range(min=0, max=LAYER_COUNT - 1))
    z = fields.Int(required=True, validate=validate.Range(min=0))
    bbox = fields.List(fields.Int(), required=True, validate=validate.Length(equal=4))
    amodal_area = fields.Int(required=True, validate=validate.Range(min=1))
    visible_area = fields.Int(required=True, validate=validate.Range(min=0))
    visibility = fields.Float(required=True, validate=validate.Range(min=0, max=1))
    layer_visible_area = fields.Int(required=True, validate=validate.Range(min=0))
    layer_visibility = fields.Float(required=True, validate=validate.Range(min=0, max=1))
    augment = fields.Nested(AugmentSchema, required=True)
    amodal_rle = fields.Nested(RunLengthSchema, required=True)


class ImageRecordSchema(Schema):
    image_id = fields.String(required=True, validate=validate.Length(min=1))
    stage = fields.String(required=True, validate=validate.OneOf(STAGES))
    seed = fields.Int(required=True)
    width = fields.Int(required=True, validate=validate.Range(min=1))
    height = fields.Int(required=True, validate=validate.Range(min=1))
    mm_per_px = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    background_id = fields.String(required=True)
    paired_with = fields.String(allow_none=True, load_default=None)
    planned_counts = fields.List(fields.Int(validate=validate.Range(min=0)), required=True, validate=CLASS_VECTOR)
    psd_histogram = fields.List(fields.Int(validate=validate.Range(min=0)), required=True, validate=CLASS_VECTOR)
    shortfall = fields.List(fields.Int(validate=validate.Range(min=0)), required=True, validate=CLASS_VECTOR)
    instances = fields.List(fields.Nested(InstanceSchema), required=True)

    @post_load
    def make_record(self, data, **kwargs):
        width = data["width"]
        instances = []
        for entry in data.pop("instances"):
            rle = entry.pop("amodal_rle")
            if rle["size"] != [data["height"], width]:
                raise ValidationError(
                    {"instances": ["amodal_rle size does not match the canvas"]}
                )
            instances.append(InstanceRecord(amodal_rle=rle["runs"], **entry))
        return ImageRecord(instances=instances, **data)


image_record_schema = ImageRecordSchema()


def record_from_scene(scene, image_id, mm_per_px, paired_with=None):
    instances = [
        InstanceRecord(
            instance_id=instance.instance_id,
            asset_id=instance.asset_id,
            size_class=instance.size_class,
            layer=instance.layer,
            z=instance.z,
            bbox=list(instance.bbox()),
            amodal_area=instance.amodal_area,
            visible_area=instance.visible_area,
            visibility=instance.visibility,
            layer_visible_area=instance.layer_visible_area,
            layer_visibility=instance.layer_visibility,
            augment=instance.augment,
            amodal_rle=encode_placed(instance.mask.bits, instance.x, instance.y, scene.width),
        )
        for instance in scene.instances
    ]
    return ImageRecord(
        image_id=image_id,
        stage=scene.stage,
        seed=scene.seed,
        width=scene.width,
        height=scene.height,
        mm_per_px=mm_per_px,
        background_id=scene.background_id,
        planned_counts=list(scene.planned_counts),
        psd_histogram=scene.psd_histogram,
        shortfall=list(scene.shortfall),
        instances=instances,
        paired_with=paired_with,
    )


def check_record(record):
    expected_ids = list(range(1, len(record.instances) + 1))
    if record.instance_ids() != expected_ids:
        raise MetadataInvariantError("instance ids must be dense 1..N in list order")

    histogram = [0] * len(CLASS_INDICES)
    previous_layer = 0
    for instance in record.instances:
        histogram[instance.size_class - 1] += 1
        if instance.z != instance.instance_id - 1:
            raise MetadataInvariantError(f"z {instance.z} out of order", instance.instance_id)
        if instance.layer < previous_layer:
            raise MetadataInvariantError("layers must not decrease in z", instance.instance_id)
        previous_layer = instance.layer
        if instance.visibility != instance.visible_area / instance.amodal_area:
            raise MetadataInvariantError(
                f"visibility {instance.visibility} != visible_area / amodal_area", instance.instance_id
            )
        if instance.layer_visibility != instance.layer_visible_area / instance.amodal_area:
            raise MetadataInvariantError(
                "layer_visibility != layer_visible_area / amodal_area", instance.instance_id
            )
        if run_area(instance.amodal_rle) != instance.amodal_area:
            raise MetadataInvariantError("amodal runs do not add up to amodal_area", instance.instance_id)
        if list(run_bbox(instance.amodal_rle, record.width)) != list(instance.bbox):
            raise MetadataInvariantError("bbox does not enclose the amodal runs", instance.instance_id)

    if histogram != list(record.psd_histogram):
        raise MetadataInvariantError(f"psd_histogram {record.psd_histogram} != instance counts {histogram}")


def dump_record(record):
    data = {
        "image_id": record.image_id,
        "stage": record.stage,
        "seed": record.seed,
        "width": record.width,
        "height": record.height,
        "mm_per_px": record.mm_per_px,
        "background_id": record.background_id,
        "paired_with": record.paired_with,
        "planned_counts": record.planned_counts,
        "psd_histogram": record.psd_histogram,
        "shortfall": record.shortfall,
        "instances": [
            {
                **asdict(instance),
                "amodal_rle": {"size": [record.height, record.width], "runs": instance.amodal_rle},
            }
            for instance in record.instances
        ],
    }
    return image_record_schema.dump(data)


def write_metadata(record, path):
    check_record(record)
    write_json(path, dump_record(record))


def load_record(raw, path=None):
    try:
        return image_record_schema.load(raw)
    except ValidationError as e:
        raise MetadataSchemaError(flatten_messages(e.messages), path)


def read_metadata(path):
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise MetadataSchemaError({"_schema": [f"invalid JSON: {e.msg}"]}, path)
    return load_record(raw, path=str(path))
