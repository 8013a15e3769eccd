import numpy as np
import pytest

from particle_bench.config import load_config
from particle_bench.evaluation import evaluate_dataset
from particle_bench.generation import generate_dataset
from particle_bench.particles import catalog_save
from particle_bench.particles.imports import import_directory
from particle_bench.rendering.graymap import GraymapMask, read_pgm, write_pgm
from particle_bench.rendering.images import write_png
from particle_bench.stats import dataset_stats
from tests.helpers.particle_test_case import CLASS_RADII, MM_PER_PX, ParticleTestCase, disc_bits, textured_cutout


@pytest.mark.smoke
@pytest.mark.integration
class TestPipeline(ParticleTestCase):
    def import_discs(self):
        src = self.tmp_dir / "cutouts"
        src.mkdir()
        for index, radius in CLASS_RADII.items():
            for seed in range(2):
                bits = disc_bits(radius)
                stem = f"c{index}_{seed}"
                write_png(textured_cutout(bits, seed=seed), src / f"{stem}.png")
                gray = np.where(bits, 255, 0).astype(np.uint8)
                write_png(np.dstack([gray] * 3), src / f"{stem}_mask.png")
        summary = import_directory(src, MM_PER_PX, jobs=2)
        catalog_save(summary.catalog, self.tmp_dir / "catalog")
        return summary.catalog

    def test_import_generate_evaluate(self):
        catalog = self.import_discs()
        self.assertEqual(catalog.stats(), {index: 2 for index in CLASS_RADII})

        config = load_config(
            {
                "name": "smoke",
                "master_seed": 2024,
                "image_count": 4,
                "width": 384,
                "height": 384,
                "stage": {"stage": "L3", "classes": list(CLASS_RADII)},
                "psd": {"kind": "random", "total_count_range": [40, 80]},
                "occlusion_pairs": True,
            }
        )
        gt_dir = self.tmp_dir / "gt"
        summaries = generate_dataset(config, self.tmp_dir / "catalog", gt_dir, jobs=2)
        self.assertEqual(len(summaries), 8)

        stats = dataset_stats(gt_dir, verify=True)
        self.assertEqual(stats.problems, {})
        self.assertGreaterEqual(stats.min_layer_visibility, 0.6)

        pred_dir = self.tmp_dir / "pred"
        pred_dir.mkdir()
        for summary in summaries:
            graymap = read_pgm(gt_dir / f"{summary.image_id}.pgm")
            ids = graymap.ids.copy()
            ids[:, : ids.shape[1] // 2] = 0
            write_pgm(GraymapMask(ids), pred_dir / f"{summary.image_id}.pgm")

        report = evaluate_dataset(gt_dir, pred_dir, jobs=2)
        self.assertEqual(len(report.images) + len(report.skipped), 8)
        self.assertTrue(0.0 < report.miou < 1.0)
        scores = [report.ap(t) for t in report.thresholds]
        self.assertEqual(scores, sorted(scores, reverse=True))
