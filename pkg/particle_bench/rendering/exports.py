"""Flat dataset directories: ``<image_id>.png/.pgm/.json`` triplets plus ``manifest.json``."""
import json
from pathlib import Path

from marshmallow import Schema, ValidationError, fields

from .. import __version__
from ..exceptions import InputError
from ..util import flatten_messages, write_json
from .exceptions import MetadataSchemaError
from .graymap import write_pgm
from .images import write_png
from .metadata import write_metadata

MANIFEST_FILE = "manifest.json"
TOOL_NAME = "particle-bench"


class ManifestSchema(Schema):
    tool = fields.String(required=True)
    version = fields.String(required=True)
    name = fields.String(required=True)
    config_hash = fields.String(required=True)
    master_seed = fields.Int(required=True)
    catalog_assets = fields.Int(required=True)
    config = fields.Dict(required=True)
    images = fields.List(fields.String(), required=True)


manifest_schema = ManifestSchema()


def image_paths(out_dir, image_id):
    out_dir = Path(out_dir)
    return out_dir / f"{image_id}.png", out_dir / f"{image_id}.pgm", out_dir / f"{image_id}.json"


def write_image(out_dir, record, rgb, graymap):
    png_path, pgm_path, json_path = image_paths(out_dir, record.image_id)
    write_metadata(record, json_path)
    write_pgm(graymap, pgm_path)
    write_png(rgb, png_path)
    return png_path, pgm_path, json_path


def write_manifest(out_dir, config, image_ids, catalog_assets):
    manifest = manifest_schema.dump(
        {
            "tool": TOOL_NAME,
            "version": __version__,
            "name": config.name,
            "config_hash": config.config_hash(),
            "master_seed": config.master_seed,
            "catalog_assets": catalog_assets,
            "config": config.to_dict(),
            "images": list(image_ids),
        }
    )
    path = Path(out_dir) / MANIFEST_FILE
    write_json(path, manifest)
    return path


def read_manifest(dataset_dir):
    path = Path(dataset_dir) / MANIFEST_FILE
    try:
        with open(path) as f:
            return manifest_schema.load(json.load(f))
    except FileNotFoundError:
        raise InputError(f"no manifest in {dataset_dir}")
    except json.JSONDecodeError as e:
        raise MetadataSchemaError({"_schema": [f"invalid JSON: {e.msg}"]}, str(path))
    except ValidationError as e:
        raise MetadataSchemaError(flatten_messages(e.messages), str(path))


def dataset_image_ids(dataset_dir):
    """Sorted ids of every image with both a graymap and a metadata document."""
    dataset_dir = Path(dataset_dir)
    if not dataset_dir.is_dir():
        raise InputError(f"not a directory: {dataset_dir}")
    return sorted(
        path.stem for path in dataset_dir.glob("*.pgm") if (dataset_dir / f"{path.stem}.json").exists()
    )
