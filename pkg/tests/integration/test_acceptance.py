import numpy as np
import pytest
from click.testing import CliRunner

from particle_bench.commands import cli
from particle_bench.particles.catalog import INDEX_FILE
from particle_bench.rendering.graymap import rasterize_graymap
from particle_bench.rendering.images import write_png
from particle_bench.scenes import AugmentConfig, SeedPlan, compose_scene, derive_instance_seed
from particle_bench.scenes.composer import repaint_visible_areas
from tests.helpers.particle_test_case import ParticleTestCase, counts_for, disc_bits, disc_catalog, textured_cutout

CANVAS = 512


@pytest.mark.integration
class TestNonOverlap(ParticleTestCase):
    def test_l1_scenes_never_overlap(self):
        catalog = disc_catalog(classes=(1, 3), per_class=3)
        for seed in range(10):
            size_class = (1, 3)[seed % 2]
            scene = compose_scene(
                catalog,
                counts_for(**{f"c{size_class}": 4000}),
                self.stage("L1", [size_class]),
                SeedPlan(seed, 0),
                CANVAS,
                CANVAS,
                AugmentConfig(),
            )
            self.assertGreater(len(scene), 0)
            graymap = rasterize_graymap(scene)
            self.assertEqual(sum(i.amodal_area for i in scene.instances), int(np.count_nonzero(graymap.ids)))
            self.assertTrue(all(i.visible_area == i.amodal_area for i in scene.instances))


@pytest.mark.integration
class TestVisibility(ParticleTestCase):
    def test_l2_scenes_respect_the_floor(self):
        catalog = disc_catalog(classes=(3,), per_class=3)
        stage = self.stage("L2", [3])
        for seed in range(20):
            scene = compose_scene(
                catalog, counts_for(c3=300), stage, SeedPlan(seed, 0), CANVAS, CANVAS, AugmentConfig()
            )
            repainted = repaint_visible_areas(scene.instances, CANVAS, CANVAS)
            for instance in scene.instances:
                self.assertEqual(repainted[instance.instance_id], instance.visible_area)
                self.assertTrue(0.6 <= instance.visibility <= 1.0)

    def test_l3_scenes_respect_the_floor_within_layers(self):
        catalog = disc_catalog(per_class=2)
        stage = self.stage("L3", list(range(1, 9)))
        counts = [60, 60, 40, 12, 8, 3, 2, 1]
        for seed in range(10):
            scene = compose_scene(catalog, counts, stage, SeedPlan(seed, 0), CANVAS, CANVAS, AugmentConfig())
            repainted = repaint_visible_areas(scene.instances, CANVAS, CANVAS)
            for instance in scene.instances:
                self.assertEqual(repainted[instance.instance_id], instance.visible_area)
                self.assertGreaterEqual(instance.layer_visibility, 0.6)
            for layer in {i.layer for i in scene.instances}:
                within = repaint_visible_areas(scene.instances, CANVAS, CANVAS, max_layer=layer)
                for instance in scene.instances:
                    if instance.layer == layer:
                        self.assertEqual(within[instance.instance_id], instance.layer_visible_area)


@pytest.mark.integration
class TestSeedSpace(ParticleTestCase):
    def test_a_million_triples_give_distinct_seeds(self):
        seeds = {derive_instance_seed(7, image, instance) for image in range(1000) for instance in range(1000)}
        self.assertEqual(len(seeds), 1_000_000)


@pytest.mark.integration
class TestImportCommand(ParticleTestCase):
    def test_corrupt_mask_is_skipped(self):
        src = self.tmp_dir / "src"
        src.mkdir()
        for stem, radius in (("a", 5), ("b", 9), ("c", 12)):
            bits = disc_bits(radius)
            write_png(textured_cutout(bits), src / f"{stem}.png")
            gray = np.where(bits, 255, 0).astype(np.uint8)
            write_png(np.dstack([gray] * 3), src / f"{stem}_mask.png")
        (src / "b_mask.png").write_bytes(b"not an image at all")

        args = ["import", str(src), "--mm-per-px", "0.5", "--out", str(self.tmp_dir / "lib")]
        result = CliRunner().invoke(cli, ["--settings", "tests/config.json", *args])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("Skipped 1 particles", result.output)
        self.assertTrue((self.tmp_dir / "lib" / INDEX_FILE).exists())
