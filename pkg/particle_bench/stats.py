"""PSD and visibility statistics over a generated dataset, plus the adaptation split."""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger
from marshmallow import Schema, fields
from rich.table import Table

from .exceptions import InputError
from .particles.sieve import CLASS_INDICES
from .rendering.audit import audit_image
from .rendering.exports import dataset_image_ids
from .rendering.graymap import read_pgm
from .rendering.metadata import read_metadata
from .util import write_json

VISIBILITY_BINS = np.linspace(0.0, 1.0, 11)
SPLITS_FILE = "splits.json"


@dataclass
class ImageStats:
    image_id: str
    stage: str
    planned_counts: list
    psd_histogram: list
    shortfall: list
    visibility_histogram: list
    min_visibility: float
    min_layer_visibility: float
    occluded: int

    @property
    def instances(self):
        return sum(self.psd_histogram)


@dataclass
class DatasetStats:
    images: list = field(default_factory=list)
    problems: dict = field(default_factory=dict)

    def _sum(self, name):
        return [int(v) for v in np.sum([getattr(i, name) for i in self.images], axis=0)]

    @property
    def psd_histogram(self):
        return self._sum("psd_histogram")

    @property
    def planned_counts(self):
        return self._sum("planned_counts")

    @property
    def shortfall(self):
        return self._sum("shortfall")

    @property
    def visibility_histogram(self):
        return self._sum("visibility_histogram")

    @property
    def instances(self):
        return sum(image.instances for image in self.images)

    @property
    def occluded(self):
        return sum(image.occluded for image in self.images)

    @property
    def min_visibility(self):
        return min((i.min_visibility for i in self.images if i.instances), default=1.0)

    @property
    def min_layer_visibility(self):
        return min((i.min_layer_visibility for i in self.images if i.instances), default=1.0)


def image_stats(record):
    visibilities = np.array([i.visibility for i in record.instances], dtype=float)
    layer_visibilities = np.array([i.layer_visibility for i in record.instances], dtype=float)
    histogram, _ = np.histogram(visibilities, bins=VISIBILITY_BINS)
    return ImageStats(
        image_id=record.image_id,
        stage=record.stage,
        planned_counts=list(record.planned_counts),
        psd_histogram=list(record.psd_histogram),
        shortfall=list(record.shortfall),
        visibility_histogram=[int(v) for v in histogram],
        min_visibility=float(visibilities.min()) if visibilities.size else 1.0,
        min_layer_visibility=float(layer_visibilities.min()) if layer_visibilities.size else 1.0,
        occluded=int((visibilities < 1.0).sum()),
    )


def dataset_stats(dataset_dir, verify=False):
    image_ids = dataset_image_ids(dataset_dir)
    if not image_ids:
        raise InputError(f"no images in {dataset_dir}")

    stats = DatasetStats()
    for image_id in image_ids:
        record = read_metadata(Path(dataset_dir) / f"{image_id}.json")
        stats.images.append(image_stats(record))
        if verify:
            problems = audit_image(record, read_pgm(Path(dataset_dir) / f"{image_id}.pgm"))
            if problems:
                logger.error(
                    "{image_id} failed verification: {problems}",
                    image_id=image_id,
                    problems="; ".join(problems),
                )
                stats.problems[image_id] = problems
    return stats


class ImageStatsSchema(Schema):
    image_id = fields.String()
    stage = fields.String()
    instances = fields.Int()
    planned_counts = fields.List(fields.Int())
    psd_histogram = fields.List(fields.Int())
    shortfall = fields.List(fields.Int())
    visibility_histogram = fields.List(fields.Int())
    min_visibility = fields.Float()
    min_layer_visibility = fields.Float()
    occluded = fields.Int()


class DatasetStatsSchema(Schema):
    instances = fields.Int()
    occluded = fields.Int()
    planned_counts = fields.List(fields.Int())
    psd_histogram = fields.List(fields.Int())
    shortfall = fields.List(fields.Int())
    visibility_histogram = fields.List(fields.Int())
    min_visibility = fields.Float()
    min_layer_visibility = fields.Float()
    images = fields.List(fields.Nested(ImageStatsSchema))
    problems = fields.Dict(keys=fields.String(), values=fields.List(fields.String()))


dataset_stats_schema = DatasetStatsSchema()


def write_stats(stats, path):
    write_json(path, dataset_stats_schema.dump(stats))


def class_table(stats):
    table = Table(title="Particle size distribution")
    table.add_column("class", justify="right")
    table.add_column("planned", justify="right")
    table.add_column("placed", justify="right")
    table.add_column("shortfall", justify="right")
    for index, planned, placed, short in zip(
        CLASS_INDICES, stats.planned_counts, stats.psd_histogram, stats.shortfall
    ):
        table.add_row(str(index), str(planned), str(placed), str(short))
    return table


def visibility_table(stats):
    table = Table(title="Visibility")
    table.add_column("range", justify="left")
    table.add_column("instances", justify="right")
    for low, high, count in zip(VISIBILITY_BINS[:-1], VISIBILITY_BINS[1:], stats.visibility_histogram):
        table.add_row(f"[{low:.0%}, {high:.0%}{']' if high == 1.0 else ')'}", str(count))
    table.add_row("occluded", f"{stats.occluded}/{stats.instances}", style="bold")
    table.add_row("min visibility", f"{stats.min_visibility:.3f}")
    table.add_row("min within-layer visibility", f"{stats.min_layer_visibility:.3f}")
    return table


def split_dataset(dataset_dir, fraction, seed=0):
    """Seeded random adaptation subset; the remaining images form the evaluation set."""
    if not 0 < fraction < 1:
        raise InputError(f"fraction must be in (0, 1), got {fraction}")
    image_ids = dataset_image_ids(dataset_dir)
    if not image_ids:
        raise InputError(f"no images in {dataset_dir}")

    count = max(1, int(round(fraction * len(image_ids))))
    chosen = set(np.random.default_rng(seed).permutation(len(image_ids))[:count].tolist())
    splits = {
        "seed": seed,
        "fraction": fraction,
        "adaptation": [image_id for k, image_id in enumerate(image_ids) if k in chosen],
        "evaluation": [image_id for k, image_id in enumerate(image_ids) if k not in chosen],
    }
    write_json(Path(dataset_dir) / SPLITS_FILE, splits)
    return splits
