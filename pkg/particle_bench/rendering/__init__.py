"""Scene rasterization and the on-disk artifacts: PNG, PGM and metadata JSON."""
