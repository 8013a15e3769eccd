"""Import a directory of particle cutouts and their raw masks into a catalog.

Inputs are paired by stem: ``<stem>.png`` (or ``.jpg``/``.jpeg``) with
``<stem>_mask.png`` (or ``_mask.pgm``). Unpaired files are reported, and
cutouts that fail refinement or sizing are skipped with a warning.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from loguru import logger

from ..exceptions import InputError
from ..geometry import BinaryMask, RefineParams
from ..rendering.graymap import read_pgm
from ..rendering.images import read_gray, read_png
from .assets import import_asset
from .catalog import AssetCatalog

CUTOUT_SUFFIXES = (".png", ".jpg", ".jpeg")
MASK_SUFFIXES = (".png", ".pgm")
MASK_MARKER = "_mask"


@dataclass
class ImportSummary:
    catalog: AssetCatalog
    imported: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    unpaired: list = field(default_factory=list)


def read_raw_mask(path):
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return BinaryMask(read_pgm(path).ids > 0)
    return BinaryMask(read_gray(path) > 0)


def find_pairs(src_dir):
    """([(stem, cutout_path, mask_path)], [unpaired file names]), sorted by stem."""
    files = sorted(p for p in Path(src_dir).iterdir() if p.is_file())
    cutouts, masks = {}, {}
    for path in files:
        suffix = path.suffix.lower()
        if path.stem.endswith(MASK_MARKER) and suffix in MASK_SUFFIXES:
            masks[path.stem[: -len(MASK_MARKER)]] = path
        elif suffix in CUTOUT_SUFFIXES:
            cutouts[path.stem] = path

    pairs = [(stem, cutouts[stem], masks[stem]) for stem in sorted(cutouts) if stem in masks]
    unpaired = sorted(
        [cutouts[stem].name for stem in cutouts if stem not in masks]
        + [masks[stem].name for stem in masks if stem not in cutouts]
    )
    return pairs, unpaired


def _import_pair(pair, mm_per_px, refine):
    stem, cutout_path, mask_path = pair
    try:
        cutout = read_png(cutout_path)
        raw_mask = read_raw_mask(mask_path)
        return import_asset(cutout, raw_mask, mm_per_px, refine=refine, provenance=cutout_path.name), None
    except (InputError, OSError) as e:
        return None, f"{stem}: {e}"


def import_directory(src_dir, mm_per_px, refine=None, jobs=1):
    src_dir = Path(src_dir)
    if not src_dir.is_dir():
        raise InputError(f"not a directory: {src_dir}")

    pairs, unpaired = find_pairs(src_dir)
    for name in unpaired:
        logger.warning("Unpaired input file {name}", name=name)
    if not pairs:
        raise InputError(f"no input pairs in {src_dir}")

    refine = refine or RefineParams()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(
                executor.map(_import_pair, pairs, [mm_per_px] * len(pairs), [refine] * len(pairs))
            )
    else:
        results = [_import_pair(pair, mm_per_px, refine) for pair in pairs]

    summary = ImportSummary(catalog=AssetCatalog(mm_per_px), unpaired=unpaired)
    for asset, problem in results:
        if problem:
            logger.warning("Skipping particle {problem}", problem=problem)
            summary.skipped.append(problem)
        elif summary.catalog.add(asset):
            summary.imported.append(asset.asset_id)

    if not summary.imported:
        raise InputError(f"no particles could be imported from {src_dir}")

    logger.info(
        "Imported {imported} particles, skipped {skipped}",
        imported=len(summary.imported),
        skipped=len(summary.skipped),
    )
    return summary
