import numpy as np

from particle_bench.exceptions import InputError
from particle_bench.rendering.graymap import GraymapMask
from particle_bench.rendering.overlay import instance_color, render_overlay
from tests.helpers.particle_test_case import ParticleTestCase


class TestOverlay(ParticleTestCase):
    def setUp(self):
        super().setUp()
        self.rgb = np.random.default_rng(0).integers(0, 256, size=(12, 10, 3), dtype=np.uint8)

    def test_empty_graymap_returns_input(self):
        out = render_overlay(self.rgb, GraymapMask(np.zeros((12, 10))))
        self.assertTrue(np.array_equal(out, self.rgb))

    def test_deterministic(self):
        ids = np.zeros((12, 10))
        ids[2:5, 3:7] = 4
        ids[8:, :] = 700
        first = render_overlay(self.rgb, GraymapMask(ids))
        second = render_overlay(self.rgb, GraymapMask(ids))
        self.assertTrue(np.array_equal(first, second))
        self.assertTrue(np.array_equal(first[0], self.rgb[0]))

    def test_full_alpha_paints_palette_colour(self):
        ids = np.zeros((12, 10))
        ids[0, 0] = 3
        out = render_overlay(self.rgb, GraymapMask(ids), alpha=1.0)
        self.assertEqual(tuple(out[0, 0]), instance_color(3))

    def test_colour_is_stable(self):
        self.assertEqual(instance_color(17), instance_color(17))
        self.assertNotEqual(instance_color(17), instance_color(18))
        for channel in instance_color(65535):
            self.assertTrue(64 <= channel <= 255)

    def test_dimension_mismatch(self):
        with self.assertRaises(InputError):
            render_overlay(self.rgb, GraymapMask(np.zeros((10, 12))))
