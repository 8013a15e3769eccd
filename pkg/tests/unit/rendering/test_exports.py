from particle_bench.config import read_config
from particle_bench.exceptions import InputError
from particle_bench.rendering.exports import dataset_image_ids, read_manifest, write_manifest
from tests.helpers.particle_test_case import ParticleTestCase


class TestExports(ParticleTestCase):
    def test_manifest_round_trip(self):
        config = read_config(preset="L2-l", overrides={"master_seed": 5})
        write_manifest(self.tmp_dir, config, ["a", "b"], 12)
        manifest = read_manifest(self.tmp_dir)
        self.assertEqual(manifest["tool"], "particle-bench")
        self.assertEqual(manifest["master_seed"], 5)
        self.assertEqual(manifest["images"], ["a", "b"])
        self.assertEqual(manifest["config_hash"], config.config_hash())

    def test_missing_manifest(self):
        with self.assertRaises(InputError):
            read_manifest(self.tmp_dir)

    def test_image_ids_need_graymap_and_metadata(self):
        for name in ("a.pgm", "a.json", "b.pgm", "c.json", "manifest.json"):
            (self.tmp_dir / name).write_text("")
        self.assertEqual(dataset_image_ids(self.tmp_dir), ["a"])
