import json
import shutil

import numpy as np
from click.testing import CliRunner

from particle_bench.commands import EXIT_INPUT, cli
from particle_bench.particles.catalog import INDEX_FILE
from particle_bench.rendering.graymap import GraymapMask, write_pgm
from particle_bench.rendering.images import read_png, write_png
from tests.helpers.particle_test_case import ParticleTestCase, disc_bits, textured_cutout


class TestCommands(ParticleTestCase):
    def setUp(self):
        super().setUp()
        self.runner = CliRunner()

    def invoke(self, *args):
        result = self.runner.invoke(cli, ["--settings", "tests/config.json", *map(str, args)])
        return result

    def write_config(self, **overrides):
        raw = {
            "name": "cli",
            "master_seed": 4,
            "image_count": 2,
            "width": 96,
            "height": 96,
            "catalog": "catalog",
            "stage": {"stage": "L2", "classes": [3]},
            "psd": {"kind": "uniform", "total_count": 6},
        }
        raw.update(overrides)
        path = self.tmp_dir / "run.json"
        path.write_text(json.dumps(raw))
        self.tiny_catalog_dir()
        return path

    def test_import(self):
        src = self.tmp_dir / "src"
        src.mkdir()
        for stem, radius in (("a", 5), ("b", 9)):
            bits = disc_bits(radius)
            write_png(textured_cutout(bits), src / f"{stem}.png")
            gray = np.where(bits, 255, 0).astype(np.uint8)
            write_png(np.dstack([gray] * 3), src / f"{stem}_mask.png")

        result = self.invoke("import", src, "--mm-per-px", 0.5, "--out", self.tmp_dir / "lib")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((self.tmp_dir / "lib" / INDEX_FILE).exists())
        self.assertIn("total", result.output)

    def test_import_without_pairs(self):
        result = self.invoke("import", self.tmp_dir, "--mm-per-px", 0.5, "--out", self.tmp_dir / "lib")
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_generate_evaluate_stats(self):
        config = self.write_config()
        out_dir = self.tmp_dir / "data"
        result = self.invoke("generate", config, "--out", out_dir, "--metrics-file", self.tmp_dir / "m.prom")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((out_dir / "img_00001.png").exists())
        self.assertTrue((self.tmp_dir / "m.prom").exists())

        pred_dir = self.tmp_dir / "pred"
        pred_dir.mkdir()
        for name in ("img_00000.pgm", "img_00001.pgm"):
            shutil.copy(out_dir / name, pred_dir / name)
        result = self.invoke("evaluate", out_dir, pred_dir, "--out", self.tmp_dir / "report")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("mAP50", result.output)
        report = json.loads((self.tmp_dir / "report" / "report.json").read_text())
        self.assertEqual(report["aggregate"]["miou"], 1.0)

        result = self.invoke("stats", out_dir, "--verify", "--out", self.tmp_dir / "stats.json")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("verified", result.output)

        result = self.invoke("split", out_dir, "--fraction", 0.5, "--seed", 1)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((out_dir / "splits.json").exists())

    def test_stats_verify_rejects_a_tampered_graymap(self):
        config = self.write_config(image_count=1)
        out_dir = self.tmp_dir / "data"
        self.invoke("generate", config, "--out", out_dir)
        write_pgm(GraymapMask(np.zeros((96, 96))), out_dir / "img_00000.pgm")
        result = self.invoke("stats", out_dir, "--verify")
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_generate_overrides(self):
        config = self.write_config()
        out_dir = self.tmp_dir / "data"
        result = self.invoke("generate", config, "--out", out_dir, "--images", 1, "--canvas", 64, "--seed", 8)
        self.assertEqual(result.exit_code, 0, result.output)
        manifest = json.loads((out_dir / "manifest.json").read_text())
        self.assertEqual(manifest["images"], ["img_00000"])
        self.assertEqual(manifest["master_seed"], 8)
        self.assertEqual(read_png(out_dir / "img_00000.png").shape, (64, 64, 3))

    def test_evaluate_missing_predictions(self):
        config = self.write_config()
        out_dir = self.tmp_dir / "data"
        self.invoke("generate", config, "--out", out_dir)
        pred_dir = self.tmp_dir / "pred"
        pred_dir.mkdir()
        result = self.invoke("evaluate", out_dir, pred_dir)
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_evaluate_run_past_canvas(self):
        config = self.write_config(image_count=1)
        out_dir = self.tmp_dir / "data"
        self.invoke("generate", config, "--out", out_dir)
        pred_dir = self.tmp_dir / "pred"
        pred_dir.mkdir()
        document = {"instances": [{"rle": {"size": [96, 96], "runs": [[9216, 5]]}}]}
        (pred_dir / "img_00000.json").write_text(json.dumps(document))
        result = self.invoke("evaluate", out_dir, pred_dir)
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_invalid_config(self):
        config = self.write_config(stage={"stage": "L2", "classes": [1, 2]})
        result = self.invoke("generate", config, "--out", self.tmp_dir / "data")
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_overlay(self):
        config = self.write_config(image_count=1)
        out_dir = self.tmp_dir / "data"
        self.invoke("generate", config, "--out", out_dir)
        target = self.tmp_dir / "overlay.png"
        result = self.invoke("overlay", out_dir / "img_00000.png", out_dir / "img_00000.pgm", target)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(read_png(target).shape, (96, 96, 3))
