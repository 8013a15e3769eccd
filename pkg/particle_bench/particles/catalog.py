"""On-disk particle catalog: ``class_<k>/<asset_id>.png`` + ``.pgm`` + ``index.json``."""
import json
from pathlib import Path

from loguru import logger
from marshmallow import ValidationError

from ..exceptions import CatalogError, EmptyPoolError, InputError, MissingAssetError, SieveRangeError
from ..geometry import BinaryMask
from ..rendering.graymap import GraymapMask, read_pgm, write_pgm
from ..rendering.images import read_rgba_png, write_rgba_png
from ..util import flatten_messages, write_json
from .assets import ParticleAsset
from .serializers import catalog_index_schema
from .sieve import CLASS_INDICES, classify_size, size_class

INDEX_FILE = "index.json"


def class_dir(index):
    return f"class_{index}"


class AssetCatalog:
    def __init__(self, mm_per_px, root=None):
        self.mm_per_px = float(mm_per_px)
        self.root = Path(root) if root else None
        self.pools = {index: [] for index in CLASS_INDICES}
        self._by_id = {}

    def add(self, asset):
        if asset.asset_id in self._by_id:
            logger.warning("Skipping duplicate asset {asset_id}", asset_id=asset.asset_id)
            return False
        self.pools[asset.size_class.index].append(asset)
        self._by_id[asset.asset_id] = asset
        return True

    def get(self, asset_id):
        try:
            return self._by_id[asset_id]
        except KeyError:
            raise MissingAssetError(asset_id)

    def pool(self, index):
        assets = self.pools[index]
        if not assets:
            raise EmptyPoolError(index)
        return assets

    def stats(self):
        return {index: len(assets) for index, assets in self.pools.items()}

    def __iter__(self):
        for index in CLASS_INDICES:
            yield from self.pools[index]

    def __len__(self):
        return len(self._by_id)

    def __contains__(self, asset_id):
        return asset_id in self._by_id

    def __eq__(self, other):
        if not isinstance(other, AssetCatalog):
            return NotImplemented
        return self.mm_per_px == other.mm_per_px and self.pools == other.pools

    def __repr__(self):
        return f"<AssetCatalog(root='{self.root}', assets={len(self)}, mm_per_px={self.mm_per_px})>"


def catalog_save(catalog, root):
    root = Path(root)
    entries = []
    for asset in catalog:
        folder = class_dir(asset.size_class.index)
        (root / folder).mkdir(parents=True, exist_ok=True)
        sprite_path = f"{folder}/{asset.asset_id}.png"
        mask_path = f"{folder}/{asset.asset_id}.pgm"
        write_rgba_png(asset.sprite, root / sprite_path)
        write_pgm(GraymapMask.from_binary(asset.mask), root / mask_path)
        entries.append(
            {
                "asset_id": asset.asset_id,
                "size_class": asset.size_class.index,
                "size_mm": asset.size_mm,
                "width": asset.width,
                "height": asset.height,
                "sprite": sprite_path,
                "mask": mask_path,
                "provenance": asset.provenance,
            }
        )

    index = catalog_index_schema.dump({"mm_per_px": catalog.mm_per_px, "assets": entries})
    write_json(root / INDEX_FILE, index)
    catalog.root = root
    logger.info("Saved {count} assets to {root}", count=len(entries), root=str(root))
    return root


def _read_index(root):
    index_path = root / INDEX_FILE
    if not index_path.exists():
        raise CatalogError("missing catalog index", index_path)
    try:
        with open(index_path) as f:
            raw = json.load(f)
        return catalog_index_schema.load(raw)
    except json.JSONDecodeError as e:
        raise CatalogError(f"corrupt catalog index ({e.msg})", index_path)
    except ValidationError as e:
        fields = ", ".join(sorted(flatten_messages(e.messages)))
        raise CatalogError(f"corrupt catalog index (fields {fields})", index_path)


def _load_entry(root, entry):
    sprite_path, mask_path = root / entry["sprite"], root / entry["mask"]
    for path in (sprite_path, mask_path):
        if not path.exists():
            raise CatalogError("missing asset file", path)

    try:
        sprite = read_rgba_png(sprite_path)
        mask = BinaryMask(read_pgm(mask_path).ids > 0)
        expected = size_class(entry["size_class"])
        if classify_size(entry["size_mm"]) != expected:
            raise CatalogError(
                f"size {entry['size_mm']} mm does not belong to class {expected.index}",
                mask_path,
            )
        return ParticleAsset(
            asset_id=entry["asset_id"],
            sprite=sprite,
            mask=mask,
            size_mm=entry["size_mm"],
            size_class=expected,
            provenance=entry["provenance"],
        )
    except CatalogError:
        raise
    except (InputError, SieveRangeError, OSError) as e:
        raise CatalogError(f"unreadable asset {entry['asset_id']} ({e})", mask_path)


def catalog_load(root, mm_per_px=None):
    root = Path(root)
    index = _read_index(root)
    if mm_per_px is not None and float(mm_per_px) != index["mm_per_px"]:
        raise CatalogError(
            f"catalog scale {index['mm_per_px']} mm/px does not match requested {mm_per_px} mm/px",
            root / INDEX_FILE,
        )

    catalog = AssetCatalog(index["mm_per_px"], root=root)
    for entry in index["assets"]:
        catalog.add(_load_entry(root, entry))

    logger.debug("Loaded catalog {catalog}", catalog=repr(catalog))
    return catalog
