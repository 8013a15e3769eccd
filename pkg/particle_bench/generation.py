"""Dataset generation: compose, render and write every image of a config.

Images are independent. Each one is driven by ``SeedPlan(master_seed, index)``
so the output tree does not depend on how many worker processes run.
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from loguru import logger
from prometheus_client import CollectorRegistry, Summary, write_to_textfile

from .exceptions import InputError
from .particles.catalog import catalog_load
from .rendering.background import load_background
from .rendering.compositor import composite_rgb
from .rendering.exports import write_image, write_manifest
from .rendering.graymap import rasterize_graymap
from .rendering.metadata import record_from_scene
from .scenes.composer import compose_scene
from .scenes.psd import pair_occlusion_variant, sample_psd
from .scenes.seeding import SeedPlan, companion_index

LOW_SUFFIX = "_low"


class GenerationMetrics:
    def __init__(self):
        self.registry = CollectorRegistry()
        self.compose = Summary(
            "particle_bench_compose_seconds", "Time spent composing one scene", registry=self.registry
        )
        self.render = Summary(
            "particle_bench_render_seconds",
            "Time spent rendering and writing one image",
            registry=self.registry,
        )

    def observe(self, summary):
        self.compose.observe(summary.compose_seconds)
        self.render.observe(summary.render_seconds)

    def write(self, path):
        write_to_textfile(str(path), self.registry)


@dataclass
class ImageSummary:
    image_id: str
    instances: int
    shortfall: int
    compose_seconds: float
    render_seconds: float


def _render(config, catalog, background, out_dir, scene, image_id, paired_with, compose_seconds):
    started = time.perf_counter()
    record = record_from_scene(scene, image_id, catalog.mm_per_px, paired_with=paired_with)
    rgb = composite_rgb(scene, background, catalog, feather=config.feather)
    write_image(out_dir, record, rgb, rasterize_graymap(scene))
    return ImageSummary(
        image_id=image_id,
        instances=len(scene),
        shortfall=sum(scene.shortfall),
        compose_seconds=compose_seconds,
        render_seconds=time.perf_counter() - started,
    )


def _compose(config, catalog, counts, stage, seeds, background):
    started = time.perf_counter()
    scene = compose_scene(
        catalog,
        counts,
        stage,
        seeds,
        config.width,
        config.height,
        config.augment,
        background_id=background.background_id,
    )
    return scene, time.perf_counter() - started


def generate_image(config, catalog, background, out_dir, index):
    """Write image ``index`` (and its low-occlusion companion when enabled)."""
    image_id = config.image_id(index)
    stage = config.stage_for(index)
    seeds = SeedPlan(config.master_seed, index)
    counts = sample_psd(config.psd, seeds.image_rng(), stage.classes)

    scene, seconds = _compose(config, catalog, counts, stage, seeds, background)
    low_id = image_id + LOW_SUFFIX if config.occlusion_pairs else None
    summaries = [_render(config, catalog, background, out_dir, scene, image_id, low_id, seconds)]

    if config.occlusion_pairs:
        low_counts = pair_occlusion_variant(scene.psd_histogram)
        low_seeds = SeedPlan(config.master_seed, companion_index(index))
        low_scene, seconds = _compose(config, catalog, low_counts, stage, low_seeds, background)
        summaries.append(
            _render(config, catalog, background, out_dir, low_scene, low_id, image_id, seconds)
        )
    return summaries


_worker_state = {}


def _init_worker(config, catalog_root, background_dir):
    catalog = catalog_load(catalog_root, mm_per_px=config.mm_per_px)
    _worker_state["catalog"] = catalog
    _worker_state["background"] = load_background(config.background, base_dir=background_dir)


def _generate_in_worker(config, out_dir, index):
    return generate_image(
        config, _worker_state["catalog"], _worker_state["background"], out_dir, index
    )


def generate_dataset(config, catalog_root, out_dir, jobs=None, base_dir=None, metrics=None):
    """Generate every image of ``config`` into ``out_dir`` and write the manifest."""
    if catalog_root is None:
        raise InputError("no catalog given (config 'catalog', --catalog or PARTICLE_BENCH_CATALOG)")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = jobs or config.jobs

    catalog = catalog_load(catalog_root, mm_per_px=config.mm_per_px)
    background = load_background(config.background, base_dir=base_dir)
    metrics = metrics or GenerationMetrics()
    indices = range(config.image_count)
    logger.info(
        "Generating {count} {stage} images into {out_dir} with {jobs} jobs",
        count=config.image_count,
        stage=config.stage.stage,
        out_dir=str(out_dir),
        jobs=jobs,
    )

    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_worker,
            initargs=(config, catalog_root, base_dir),
        ) as executor:
            results = list(
                executor.map(
                    _generate_in_worker,
                    [config] * len(indices),
                    [out_dir] * len(indices),
                    indices,
                )
            )
    else:
        results = [generate_image(config, catalog, background, out_dir, index) for index in indices]

    summaries = [summary for per_index in results for summary in per_index]
    for summary in summaries:
        metrics.observe(summary)
        if summary.shortfall:
            logger.warning(
                "{image_id}: {shortfall} planned instances could not be placed",
                image_id=summary.image_id,
                shortfall=summary.shortfall,
            )

    write_manifest(out_dir, config, [s.image_id for s in summaries], len(catalog))
    logger.info("Wrote {count} images", count=len(summaries))
    return summaries
