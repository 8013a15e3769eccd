import numpy as np

from particle_bench.exceptions import InputError, MissingAssetError
from particle_bench.rendering.background import Background, flat_background, load_background
from particle_bench.rendering.compositor import composite_rgb
from particle_bench.rendering.images import write_png
from particle_bench.scenes import AugmentParams, Scene
from particle_bench.scenes.augment import augmented_cutout
from tests.helpers.particle_test_case import ParticleTestCase, disc_catalog, placed


class TestBackground(ParticleTestCase):
    def test_flat(self):
        background = flat_background((58, 58, 62))
        self.assertEqual(background.background_id, "flat-3a3a3e")
        canvas = background.render(5, 3)
        self.assertEqual(canvas.shape, (3, 5, 3))
        self.assertTrue((canvas == [58, 58, 62]).all())

    def test_hex_reference(self):
        self.assertEqual(load_background("#102030").color, (16, 32, 48))
        self.assertEqual(load_background(None).background_id, "flat-3a3a3e")

    def test_texture_wraps(self):
        texture = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
        canvas = Background("belt", texture=texture).render(7, 5)
        self.assertTrue(np.array_equal(canvas, np.tile(texture, (3, 3, 1))[:5, :7]))

    def test_texture_from_file(self):
        texture = np.random.default_rng(0).integers(0, 256, size=(6, 4, 3), dtype=np.uint8)
        write_png(texture, self.tmp_dir / "belt.png")
        background = load_background("belt.png", base_dir=self.tmp_dir)
        self.assertEqual(background.background_id, "belt")
        self.assertEqual(background.tiling, "wrap")

    def test_missing_texture(self):
        with self.assertRaises(InputError):
            load_background(str(self.tmp_dir / "none.png"))


class TestCompositeRgb(ParticleTestCase):
    def setUp(self):
        super().setUp()
        self.catalog = disc_catalog(classes=(3,), per_class=2)
        self.assets = list(self.catalog)
        self.background = flat_background((10, 20, 30))

    def test_empty_scene_is_background(self):
        canvas = composite_rgb(Scene(32, 24, "L2", 0), self.background, self.catalog)
        self.assertTrue(np.array_equal(canvas, self.background.render(32, 24)))

    def test_one_instance(self):
        params = AugmentParams(rotation_deg=33.0, hue_shift=4.0)
        instance = placed(self.assets[0], 6, 4, 1, params=params)
        canvas = composite_rgb(Scene(48, 48, "L2", 0, instances=[instance]), self.background, self.catalog)

        sprite, mask = augmented_cutout(self.assets[0], params)
        window = canvas[instance.window()]
        self.assertTrue(np.array_equal(window[mask.bits], sprite[..., :3][mask.bits]))
        outside = ~instance.canvas_mask(48, 48).bits
        self.assertTrue((canvas[outside] == [10, 20, 30]).all())

    def test_overlap_shows_upper_instance(self):
        lower = placed(self.assets[0], 0, 0, 1)
        upper = placed(self.assets[1], 6, 0, 2)
        canvas = composite_rgb(Scene(40, 40, "L2", 0, instances=[lower, upper]), self.background, self.catalog)
        sprite, mask = augmented_cutout(self.assets[1], AugmentParams())
        both = lower.canvas_mask(40, 40).bits & upper.canvas_mask(40, 40).bits
        ys, xs = np.nonzero(both)
        self.assertTrue(np.array_equal(canvas[ys, xs], sprite[ys - 0, xs - 6, :3]))

    def test_feather_only_touches_rims(self):
        instance = placed(self.assets[0], 5, 5, 1)
        scene = Scene(40, 40, "L2", 0, instances=[instance])
        hard = composite_rgb(scene, self.background, self.catalog)
        soft = composite_rgb(scene, self.background, self.catalog, feather=True)
        changed = np.any(hard != soft, axis=2)
        self.assertTrue(changed.any())
        self.assertFalse((changed & ~instance.canvas_mask(40, 40).bits).any())

    def test_missing_asset(self):
        instance = placed(self.assets[0], 0, 0, 1)
        instance.asset_id = "gone"
        with self.assertRaises(MissingAssetError):
            composite_rgb(Scene(40, 40, "L2", 0, instances=[instance]), self.background, self.catalog)
