import time

import pytest

from particle_bench.config import read_config
from particle_bench.generation import generate_dataset
from particle_bench.particles import AssetCatalog, catalog_save
from tests.helpers.particle_test_case import CLASS_RADII, ParticleTestCase, disc_asset

CAMERA_MM_PER_PX = 0.05
TIME_LIMIT_SECONDS = 60


@pytest.mark.integration
class TestThroughput(ParticleTestCase):
    def camera_catalog(self):
        # ten times finer than the fixture scale, so radii grow tenfold for the same sieve class
        catalog = AssetCatalog(CAMERA_MM_PER_PX)
        for index, radius in CLASS_RADII.items():
            for seed in range(2):
                catalog.add(disc_asset(10 * radius, seed=seed, mm_per_px=CAMERA_MM_PER_PX))
        root = self.tmp_dir / "catalog"
        catalog_save(catalog, root)
        return root

    def test_full_canvas_l3_image_in_a_minute(self):
        catalog_root = self.camera_catalog()
        config = read_config(preset="L3-m", overrides={"image_count": 1})
        self.assertEqual((config.width, config.height), (4096, 4096))

        started = time.perf_counter()
        summaries = generate_dataset(config, catalog_root, self.tmp_dir / "out", jobs=1)
        elapsed = time.perf_counter() - started

        self.assertEqual(len(summaries), 1)
        self.assertGreaterEqual(summaries[0].instances + summaries[0].shortfall, 698)
        self.assertLess(elapsed, TIME_LIMIT_SECONDS)
