from .assets import ParticleAsset, import_asset
from .catalog import AssetCatalog, catalog_load, catalog_save
from .sieve import SIZE_CLASSES, SizeClass, classify_size, size_class
