import numpy as np

from particle_bench.evaluation import THRESHOLDS, ap_at, mean_iou
from particle_bench.evaluation.matching import InstanceSet
from particle_bench.evaluation.metrics import MetricsReport, evaluate_sets
from particle_bench.exceptions import InputError, NoGroundTruthError
from particle_bench.geometry import BinaryMask
from tests.helpers.particle_test_case import ParticleTestCase, square_mask


def iou_055_pair():
    gt = square_mask(16, 16, 0, 0, 10)
    bits = np.zeros((16, 16), dtype=bool)
    bits[0:5, 0:10] = True
    bits[5, 0:5] = True
    return gt, BinaryMask(bits)


def random_rectangles(rng, count, size=64):
    masks = []
    for _ in range(count):
        x, y = rng.integers(0, size - 12, size=2)
        w, h = rng.integers(4, 12, size=2)
        masks.append(square_mask(size, size, int(x), int(y), int(w), int(h)))
    return masks


class TestMeanIou(ParticleTestCase):
    def test_gt_as_pred(self):
        masks = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        self.assertEqual(mean_iou(masks, masks), 1.0)

    def test_empty_prediction(self):
        self.assertEqual(mean_iou([square_mask(20, 20, 0, 0, 5)], []), 0.0)

    def test_one_missed(self):
        gt = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        self.assertEqual(mean_iou(gt, gt[:1]), 0.5)

    def test_any_overlap_counts(self):
        gt = [square_mask(20, 20, 0, 0, 10)]
        pred = [square_mask(20, 20, 9, 9, 10)]
        self.assertAlmostEqual(mean_iou(gt, pred), 1 / 199)

    def test_no_ground_truth(self):
        with self.assertRaisesRegex(NoGroundTruthError, "no ground truth"):
            mean_iou([], [square_mask(8, 8, 0, 0, 2)])


class TestApAt(ParticleTestCase):
    def test_gt_as_pred(self):
        masks = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        for threshold in THRESHOLDS:
            self.assertEqual(ap_at(masks, masks, threshold), 1.0)

    def test_iou_055(self):
        gt, pred = iou_055_pair()
        self.assertAlmostEqual(mean_iou([gt], [pred]), 0.55)
        self.assertEqual(ap_at([gt], [pred], 0.5), 1.0)
        self.assertEqual(ap_at([gt], [pred], 0.6), 0.0)

    def test_no_predictions(self):
        gt = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        self.assertEqual(ap_at(gt, [], 0.5), 0.0)

    def test_missed_and_duplicate(self):
        gt = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        pred = [gt[0], gt[0]]
        self.assertAlmostEqual(ap_at(gt, pred, 0.5), 1 / 3)

    def test_threshold_range(self):
        masks = [square_mask(8, 8, 0, 0, 2)]
        for threshold in (0.0, 1.0, 1.5):
            with self.assertRaises(InputError):
                ap_at(masks, masks, threshold)

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            gt = random_rectangles(rng, int(rng.integers(1, 6)))
            pred = random_rectangles(rng, int(rng.integers(0, 6)))
            scores = [ap_at(gt, pred, t) if pred else 0.0 for t in THRESHOLDS]
            self.assertEqual(scores, sorted(scores, reverse=True))

    def test_prediction_order_does_not_matter(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            gt = random_rectangles(rng, 4)
            pred = random_rectangles(rng, 5)
            shuffled = [pred[i] for i in rng.permutation(5)]
            self.assertAlmostEqual(mean_iou(gt, pred), mean_iou(gt, shuffled), places=12)
            for threshold in THRESHOLDS:
                self.assertEqual(ap_at(gt, pred, threshold), ap_at(gt, shuffled, threshold))


class TestEvaluateSets(ParticleTestCase):
    def test_per_image_counts(self):
        gt_masks = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        metrics = evaluate_sets("a", InstanceSet.from_masks(gt_masks), InstanceSet.from_masks(gt_masks[:1]))
        self.assertEqual(metrics.gt_count, 2)
        self.assertEqual(metrics.segmented, 1)
        score = metrics.score(0.5)
        self.assertEqual((score.tp, score.fp, score.fn), (1, 0, 1))
        self.assertEqual(score.precision, 1.0)
        self.assertEqual(score.recall, 0.5)

    def test_empty_ground_truth(self):
        with self.assertRaises(NoGroundTruthError):
            evaluate_sets("a", InstanceSet.empty(8, 8), InstanceSet.empty(8, 8))

    def test_report_is_unweighted_mean(self):
        full = [square_mask(20, 20, 0, 0, 5), square_mask(20, 20, 10, 10, 6)]
        gt = InstanceSet.from_masks(full)
        report = MetricsReport(
            images=[
                evaluate_sets("a", gt, InstanceSet.from_masks(full)),
                evaluate_sets("b", gt, InstanceSet.from_masks(full[:1])),
                evaluate_sets("c", gt, InstanceSet.empty(20, 20)),
            ]
        )
        self.assertAlmostEqual(report.miou, (1.0 + 0.5 + 0.0) / 3)
        self.assertAlmostEqual(report.ap(0.5), (1.0 + 0.5 + 0.0) / 3)
        self.assertEqual(report.totals(0.5), (3, 0, 3))
        self.assertEqual(report.segmented, 3)
        self.assertEqual(report.gt_count, 6)
