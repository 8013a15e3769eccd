"""Click commands."""
from pathlib import Path

import click
from loguru import logger
from rich.console import Console
from rich.table import Table

from .app import create_app
from .config import PRESETS, read_config
from .evaluation.reports import (
    REPORT_CSV,
    REPORT_JSON,
    evaluate_dataset,
    report_table,
    write_report_csv,
    write_report_json,
)
from .exceptions import InputError
from .generation import GenerationMetrics, generate_dataset
from .geometry import RefineParams
from .particles.catalog import catalog_save
from .particles.imports import import_directory
from .particles.sieve import CLASS_INDICES
from .rendering.graymap import read_pgm
from .rendering.images import read_png, write_png
from .rendering.overlay import DEFAULT_ALPHA, render_overlay
from .stats import class_table, dataset_stats, split_dataset, visibility_table, write_stats

EXIT_INTERNAL = 1
EXIT_INPUT = 2

console = Console()


class ParticleBenchGroup(click.Group):
    """Maps InputError to exit code 2 and any other failure to exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except click.exceptions.Abort:
            raise
        except InputError as e:
            logger.error("{error}", error=str(e))
            ctx.exit(EXIT_INPUT)
        except Exception:
            logger.exception("Internal error")
            ctx.exit(EXIT_INTERNAL)


@click.group(cls=ParticleBenchGroup)
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level")
@click.option(
    "--settings",
    type=click.Path(dir_okay=False),
    default=None,
    help="Settings JSON (defaults to $PARTICLE_BENCH_SETTINGS)",
)
@click.pass_context
def cli(ctx, verbose, settings):
    """Synthetic particle scenes with exact instance ground truth."""
    ctx.obj = create_app(verbose=verbose, settings_path=settings)


def class_count_table(counts, title):
    table = Table(title=title)
    table.add_column("class", justify="right")
    table.add_column("assets", justify="right")
    for index in CLASS_INDICES:
        table.add_row(str(index), str(counts.get(index, 0)))
    table.add_row("total", str(sum(counts.values())), style="bold")
    return table


@click.command(name="import")
@click.argument("src_dir", type=click.Path(file_okay=False))
@click.option("--mm-per-px", type=float, required=True, help="Camera scale in millimetres per pixel")
@click.option("-o", "--out", "out_dir", default=None, help="Catalog directory (defaults to the configured catalog)")
@click.option("--radius", type=int, default=1, help="Refinement kernel radius")
@click.option("-j", "--jobs", type=int, default=1, help="Worker processes")
@click.pass_obj
def import_assets(app, src_dir, mm_per_px, out_dir, radius, jobs):
    """Refine, size and classify particle cutouts into a catalog"""
    out_dir = app.catalog_dir(out_dir)
    if not out_dir:
        raise InputError("no catalog directory given (--out, PARTICLE_BENCH_CATALOG or CATALOG_DIR)")

    summary = import_directory(src_dir, mm_per_px, refine=RefineParams(radius=radius), jobs=jobs)
    catalog_save(summary.catalog, out_dir)

    console.print(class_count_table(summary.catalog.stats(), f"Catalog {out_dir}"))
    if summary.unpaired:
        console.print(f"Unpaired files: {', '.join(summary.unpaired)}")
    if summary.skipped:
        console.print(f"Skipped {len(summary.skipped)} particles, see warnings above")


@click.command()
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@click.option("-p", "--preset", type=click.Choice(PRESETS), default=None, help="Start from a shipped preset")
@click.option("-c", "--catalog", default=None, help="Catalog directory")
@click.option("-o", "--out", "out_dir", default=None, help="Dataset directory")
@click.option("-s", "--seed", type=int, default=None, help="Override master_seed")
@click.option("-n", "--images", type=int, default=None, help="Override image_count")
@click.option("--canvas", type=int, default=None, help="Override the canvas to a square of this size")
@click.option("-j", "--jobs", type=int, default=None, help="Worker processes (output does not depend on it)")
@click.option("--metrics-file", type=click.Path(dir_okay=False), default=None, help="Write timing metrics here")
@click.pass_obj
def generate(app, config_path, preset, catalog, out_dir, seed, images, canvas, jobs, metrics_file):
    """Generate a dataset from a config file and/or preset"""
    overrides = {"master_seed": seed, "image_count": images, "width": canvas, "height": canvas}
    config = read_config(config_path, preset=preset, overrides=overrides)

    base_dir = Path(config_path).parent if config_path else None
    catalog_root = catalog or config.catalog
    if catalog_root and base_dir and not Path(catalog_root).is_absolute() and not catalog:
        catalog_root = base_dir / catalog_root
    catalog_root = app.catalog_dir(catalog_root)

    out_dir = out_dir or config.output_dir
    if not out_dir:
        raise InputError("no output directory given (--out or output_dir)")

    metrics = GenerationMetrics()
    summaries = generate_dataset(
        config, catalog_root, out_dir, jobs=jobs, base_dir=base_dir, metrics=metrics
    )
    if metrics_file:
        metrics.write(metrics_file)

    placed = sum(s.instances for s in summaries)
    shortfall = sum(s.shortfall for s in summaries)
    console.print(f"{len(summaries)} images, {placed} instances, shortfall {shortfall} -> {out_dir}")


@click.command()
@click.argument("gt_dir", type=click.Path(file_okay=False))
@click.argument("pred_dir", type=click.Path(file_okay=False))
@click.option("-o", "--out", "out_dir", default=None, help="Write report.json and report.csv here")
@click.option("--amodal", is_flag=True, help="Score against amodal masks instead of visible masks")
@click.option(
    "--max-area-fraction",
    type=float,
    default=None,
    help="Drop predictions larger than this fraction of the canvas",
)
@click.option("-j", "--jobs", type=int, default=1, help="Worker processes")
def evaluate(gt_dir, pred_dir, out_dir, amodal, max_area_fraction, jobs):
    """Score predicted instance masks against a generated dataset"""
    report = evaluate_dataset(
        gt_dir, pred_dir, amodal=amodal, max_area_fraction=max_area_fraction, jobs=jobs
    )
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        write_report_json(report, Path(out_dir) / REPORT_JSON)
        write_report_csv(report, Path(out_dir) / REPORT_CSV)
    console.print(report_table(report, title="Amodal evaluation" if amodal else "Evaluation"))


@click.command()
@click.argument("image_path", type=click.Path(dir_okay=False))
@click.argument("graymap_path", type=click.Path(dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, help="Mask colour opacity")
def overlay(image_path, graymap_path, out_path, alpha):
    """Colour every instance of a graymap over its RGB image"""
    write_png(render_overlay(read_png(image_path), read_pgm(graymap_path), alpha=alpha), out_path)


@click.command()
@click.argument("dataset_dir", type=click.Path(file_okay=False))
@click.option("--verify", is_flag=True, help="Cross-check every graymap against its metadata")
@click.option("-o", "--out", "out_path", default=None, help="Write the statistics as JSON")
def stats(dataset_dir, verify, out_path):
    """Class histograms, visibility and occlusion summary of a dataset"""
    result = dataset_stats(dataset_dir, verify=verify)
    console.print(class_table(result))
    console.print(visibility_table(result))
    if out_path:
        write_stats(result, out_path)
    if verify:
        if result.problems:
            failed = ", ".join(sorted(result.problems))
            raise InputError(f"{len(result.problems)} images failed verification: {failed}")
        console.print(f"All {len(result.images)} images verified")


@click.command()
@click.argument("dataset_dir", type=click.Path(file_okay=False))
@click.option("-f", "--fraction", type=float, default=0.2, help="Share of images in the adaptation subset")
@click.option("-s", "--seed", type=int, default=0)
def split(dataset_dir, fraction, seed):
    """Pick a seeded adaptation subset and write splits.json"""
    splits = split_dataset(dataset_dir, fraction, seed=seed)
    console.print(
        f"{len(splits['adaptation'])} adaptation, {len(splits['evaluation'])} evaluation images"
    )


cli.add_command(import_assets)
cli.add_command(generate)
cli.add_command(evaluate)
cli.add_command(overlay)
cli.add_command(stats)
cli.add_command(split)
