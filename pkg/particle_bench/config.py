"""Generation configs: JSON documents, optionally layered over a shipped preset."""
import json
from importlib import resources

from marshmallow import Schema, ValidationError, fields, post_load, validate, validates_schema

from .exceptions import ConfigError, InputError
from .particles.sieve import CLASS_INDICES
from .scenes.augment import ROTATION_MODES, AugmentConfig
from .scenes.psd import PSD_KINDS, PsdSpec
from .scenes.stages import (
    DEFAULT_MAX_PLACE_ATTEMPTS,
    DEFAULT_SATURATION_PATIENCE,
    DEFAULT_VISIBILITY_FLOOR,
    STAGES,
    StageSpec,
)
from .util import canonical_hash, flatten_messages

PRESETS = ("L1", "L2-l", "L2-h", "L3-0", "L3-m", "L3-h")
DEFAULT_CANVAS = 4096
DEFAULT_MM_PER_PX = 0.05
CLASS_INDEX = fields.Int(validate=validate.OneOf(CLASS_INDICES))


def _build(factory, data):
    try:
        return factory(**data)
    except InputError as e:
        raise ValidationError(str(e))


class StageSchema(Schema):
    stage = fields.String(required=True, validate=validate.OneOf(STAGES))
    classes = fields.List(CLASS_INDEX, required=True, validate=validate.Length(min=1))
    visibility_floor = fields.Float(
        load_default=DEFAULT_VISIBILITY_FLOOR,
        validate=validate.Range(min=0, max=1, min_inclusive=False),
    )
    max_place_attempts = fields.Int(load_default=DEFAULT_MAX_PLACE_ATTEMPTS, validate=validate.Range(min=1))
    l1_saturation_patience = fields.Int(load_default=DEFAULT_SATURATION_PATIENCE, validate=validate.Range(min=1))

    @post_load
    def make_stage(self, data, **kwargs):
        return _build(StageSpec, data)


class PsdSchema(Schema):
    kind = fields.String(required=True, validate=validate.OneOf(PSD_KINDS))
    total_count = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))
    total_count_range = fields.List(
        fields.Int(validate=validate.Range(min=1)),
        load_default=None,
        allow_none=True,
        validate=validate.Length(equal=2),
    )
    mean_class = fields.Float(load_default=None, allow_none=True)
    std_class = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    counts = fields.List(
        fields.Int(validate=validate.Range(min=0)),
        load_default=None,
        allow_none=True,
        validate=validate.Length(equal=len(CLASS_INDICES)),
    )

    @post_load
    def make_psd(self, data, **kwargs):
        return _build(PsdSpec, data)


class AugmentConfigSchema(Schema):
    flip = fields.Bool(load_default=True)
    rotate = fields.Bool(load_default=True)
    colorize = fields.Bool(load_default=True)
    hue_range = fields.Float(load_default=10.0, validate=validate.Range(min=0, max=180))
    sat_range = fields.Float(load_default=0.15, validate=validate.Range(min=0, max=1, max_inclusive=False))
    val_range = fields.Float(load_default=0.15, validate=validate.Range(min=0, max=1, max_inclusive=False))
    rotation_mode = fields.String(load_default="any", validate=validate.OneOf(ROTATION_MODES))

    @post_load
    def make_augment(self, data, **kwargs):
        return _build(AugmentConfig, data)


class GenerationConfigSchema(Schema):
    name = fields.String(load_default="custom")
    master_seed = fields.Int(load_default=0, validate=validate.Range(min=-(2**63), max=2**63 - 1))
    image_count = fields.Int(load_default=1, validate=validate.Range(min=1))
    image_prefix = fields.String(load_default="img", validate=validate.Regexp(r"\A[A-Za-z0-9_-]+\Z"))
    width = fields.Int(load_default=DEFAULT_CANVAS, validate=validate.Range(min=1, max=65535))
    height = fields.Int(load_default=DEFAULT_CANVAS, validate=validate.Range(min=1, max=65535))
    mm_per_px = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    catalog = fields.String(load_default=None, allow_none=True)
    stage = fields.Nested(StageSchema, required=True)
    class_schedule = fields.List(CLASS_INDEX, load_default=None, allow_none=True)
    psd = fields.Nested(PsdSchema, required=True)
    augment = fields.Nested(AugmentConfigSchema, load_default=lambda: {})
    background = fields.String(load_default=None, allow_none=True)
    feather = fields.Bool(load_default=False)
    occlusion_pairs = fields.Bool(load_default=False)
    output_dir = fields.String(load_default=None, allow_none=True)
    jobs = fields.Int(load_default=1, validate=validate.Range(min=1))

    @validates_schema(skip_on_field_errors=True)
    def check_schedule(self, data, **kwargs):
        schedule = data.get("class_schedule")
        if schedule and data["stage"].stage == "L3":
            raise ValidationError("class_schedule applies to single-class stages only", "class_schedule")

    @post_load
    def make_config(self, data, **kwargs):
        if isinstance(data["augment"], dict):
            data["augment"] = AugmentConfig(**data["augment"])
        return GenerationConfig(**data)


generation_config_schema = GenerationConfigSchema()


class GenerationConfig:
    def __init__(self, stage, psd, augment, **settings):
        self.stage = stage
        self.psd = psd
        self.augment = augment
        self.name = settings["name"]
        self.master_seed = settings["master_seed"]
        self.image_count = settings["image_count"]
        self.image_prefix = settings["image_prefix"]
        self.width = settings["width"]
        self.height = settings["height"]
        self.mm_per_px = settings["mm_per_px"]
        self.catalog = settings["catalog"]
        self.class_schedule = settings["class_schedule"]
        self.background = settings["background"]
        self.feather = settings["feather"]
        self.occlusion_pairs = settings["occlusion_pairs"]
        self.output_dir = settings["output_dir"]
        self.jobs = settings["jobs"]

    def image_id(self, index):
        return f"{self.image_prefix}_{index:05d}"

    def stage_for(self, index):
        """Stage spec of image ``index``; single-class stages walk the class schedule."""
        if not self.class_schedule:
            return self.stage
        return self.stage.with_classes([self.class_schedule[index % len(self.class_schedule)]])

    def to_dict(self):
        """Everything that determines the generated pixels."""
        return {
            "name": self.name,
            "master_seed": self.master_seed,
            "image_count": self.image_count,
            "image_prefix": self.image_prefix,
            "width": self.width,
            "height": self.height,
            "mm_per_px": self.mm_per_px,
            "stage": self.stage.to_dict(),
            "class_schedule": self.class_schedule,
            "psd": self.psd.to_dict(),
            "augment": self.augment.to_dict(),
            "background": self.background,
            "feather": self.feather,
            "occlusion_pairs": self.occlusion_pairs,
        }

    def config_hash(self):
        return canonical_hash(self.to_dict())

    def __repr__(self):
        return f"<GenerationConfig(name='{self.name}', stage='{self.stage.stage}', images={self.image_count})>"


def preset_dict(name):
    if name not in PRESETS:
        raise ConfigError({"preset": [f"unknown preset {name!r}, expected one of {', '.join(PRESETS)}"]})
    text = resources.files("particle_bench").joinpath("presets", f"{name}.json").read_text()
    return json.loads(text)


def merge(base, override):
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(raw, source=None):
    try:
        return generation_config_schema.load(raw)
    except ValidationError as e:
        raise ConfigError(flatten_messages(e.messages), source)


def read_config(path=None, preset=None, overrides=None):
    """Preset, then the config file, then ``overrides``; later layers win key by key."""
    raw = preset_dict(preset) if preset else {}
    if path:
        try:
            with open(path) as f:
                raw = merge(raw, json.load(f))
        except json.JSONDecodeError as e:
            raise ConfigError({"_schema": [f"invalid JSON: {e.msg}"]}, path)
        except OSError as e:
            raise ConfigError({"_schema": [e.strerror or str(e)]}, path)
    if not raw:
        raise ConfigError({"_schema": ["no config file or preset given"]})
    raw = merge(raw, {key: value for key, value in (overrides or {}).items() if value is not None})
    return load_config(raw, source=str(path) if path else preset)
