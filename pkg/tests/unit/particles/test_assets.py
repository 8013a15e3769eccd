import numpy as np
from skimage.morphology import disk

from particle_bench.exceptions import DegenerateParticleError, InputError
from particle_bench.geometry import BinaryMask, connected_components
from particle_bench.particles import import_asset
from tests.helpers.particle_test_case import ParticleTestCase, textured_cutout


class TestImportAsset(ParticleTestCase):
    def test_disc_is_sized_and_classified(self):
        bits = np.pad(disk(50).astype(bool), 4)
        asset = import_asset(textured_cutout(bits), BinaryMask(bits), 0.1)
        self.assertGreaterEqual(asset.size_mm, 9.9)
        self.assertLessEqual(asset.size_mm, 10.0)
        self.assertEqual(asset.size_class.index, 3)

    def test_crop_keeps_one_pixel_margin(self):
        bits = np.pad(disk(50).astype(bool), 4)
        asset = import_asset(textured_cutout(bits), BinaryMask(bits), 0.1)
        self.assertEqual(asset.mask.shape, (103, 103))
        self.assertEqual(asset.mask.bbox(), (1, 1, 102, 102))

    def test_single_pixel_is_degenerate(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[5, 5] = True
        with self.assertRaises(DegenerateParticleError):
            import_asset(textured_cutout(bits), BinaryMask(bits), 0.5)

    def test_keeps_the_largest_blob(self):
        bits = np.zeros((60, 60), dtype=bool)
        bits[5:25, 5:30] = True
        bits[50, 50:53] = True
        asset = import_asset(textured_cutout(bits), BinaryMask(bits), 0.5)
        self.assertEqual(asset.mask.area, 500)
        self.assertEqual(len(connected_components(asset.mask)), 1)

    def test_sprite_coverage_matches_mask(self):
        bits = np.pad(disk(12).astype(bool), 3)
        asset = import_asset(textured_cutout(bits), BinaryMask(bits), 0.5)
        self.assertTrue(np.array_equal(asset.sprite[..., 3] > 0, asset.mask.bits))
        self.assertTrue(asset.size_class.min_mm <= asset.size_mm < asset.size_class.max_mm)

    def test_asset_id_is_stable(self):
        bits = np.pad(disk(9).astype(bool), 2)
        first = import_asset(textured_cutout(bits, seed=1), BinaryMask(bits), 0.5)
        second = import_asset(textured_cutout(bits, seed=1), BinaryMask(bits), 0.5)
        other = import_asset(textured_cutout(bits, seed=2), BinaryMask(bits), 0.5)
        self.assertEqual(first.asset_id, second.asset_id)
        self.assertNotEqual(first.asset_id, other.asset_id)

    def test_rejects_mismatched_inputs(self):
        bits = np.pad(disk(9).astype(bool), 2)
        with self.assertRaises(InputError):
            import_asset(textured_cutout(bits)[:-1], BinaryMask(bits), 0.5)
        with self.assertRaises(InputError):
            import_asset(textured_cutout(bits), BinaryMask(bits), 0.0)
