from marshmallow import Schema, fields, validate

from .sieve import CLASS_INDICES


class AssetEntrySchema(Schema):
    asset_id = fields.String(required=True, validate=validate.Length(min=1))
    size_class = fields.Int(required=True, validate=validate.OneOf(CLASS_INDICES))
    size_mm = fields.Float(required=True)
    width = fields.Int(required=True, validate=validate.Range(min=1))
    height = fields.Int(required=True, validate=validate.Range(min=1))
    sprite = fields.String(required=True)
    mask = fields.String(required=True)
    provenance = fields.String(load_default="")


class CatalogIndexSchema(Schema):
    mm_per_px = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    assets = fields.List(fields.Nested(AssetEntrySchema), required=True)


catalog_index_schema = CatalogIndexSchema()
