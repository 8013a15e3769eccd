import numpy as np

from particle_bench.rendering.audit import audit_image, repaint_from_record
from particle_bench.rendering.graymap import GraymapMask, rasterize_graymap
from particle_bench.rendering.metadata import record_from_scene
from particle_bench.scenes import AugmentConfig, SeedPlan, compose_l3
from tests.helpers.particle_test_case import MM_PER_PX, ParticleTestCase, counts_for, disc_catalog


class TestAudit(ParticleTestCase):
    def setUp(self):
        super().setUp()
        catalog = disc_catalog(classes=(1, 4, 6), per_class=1)
        scene = compose_l3(
            catalog,
            counts_for(c1=15, c4=4, c6=2),
            self.stage("L3", [1, 4, 6]),
            SeedPlan(3, 0),
            80,
            80,
            AugmentConfig(),
        )
        self.record = record_from_scene(scene, "img_00000", MM_PER_PX)
        self.graymap = rasterize_graymap(scene)

    def test_consistent_image(self):
        self.assertEqual(audit_image(self.record, self.graymap), [])
        self.assertTrue(np.array_equal(repaint_from_record(self.record), self.graymap.ids))

    def test_tampered_graymap(self):
        visible = next(i.instance_id for i in self.record.instances if i.visible_area)
        ids = self.graymap.ids.copy()
        ids[ids == visible] = 0
        problems = audit_image(self.record, GraymapMask(ids))
        self.assertTrue(any(f"instance {visible}:" in p for p in problems))

    def test_dimension_mismatch(self):
        problems = audit_image(self.record, GraymapMask(np.zeros((10, 10))))
        self.assertEqual(len(problems), 1)

    def test_within_layer_areas_are_checked(self):
        self.record.instances[0].layer_visible_area -= 1
        self.record.instances[0].layer_visibility = (
            self.record.instances[0].layer_visible_area / self.record.instances[0].amodal_area
        )
        problems = audit_image(self.record, self.graymap)
        self.assertTrue(any("within-layer" in p for p in problems))
