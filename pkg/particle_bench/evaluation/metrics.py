"""mIoU and AP_t for instance masks.

AP_t here is the detection-set Jaccard TP / (TP + FP + FN) after greedy
one-to-one matching at IoU threshold t. Confidences, when given, only break
IoU ties; there is no precision/recall curve.
"""
from dataclasses import dataclass, field

from ..exceptions import InputError, NoGroundTruthError
from .matching import candidate_pairs, greedy_match, instance_sets

THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass
class ThresholdScore:
    threshold: float
    tp: int
    fp: int
    fn: int

    @property
    def precision(self):
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else 1.0

    @property
    def recall(self):
        expected = self.tp + self.fn
        return self.tp / expected if expected else 1.0

    @property
    def ap(self):
        total = self.tp + self.fp + self.fn
        return self.tp / total if total else 1.0

    @classmethod
    def from_match(cls, match):
        return cls(threshold=match.threshold, tp=match.tp, fp=match.fp, fn=match.fn)


@dataclass
class ImageMetrics:
    image_id: str
    gt_count: int
    pred_count: int
    miou: float
    scores: list = field(default_factory=list)

    @property
    def segmented(self):
        """GT instances matched at the lowest threshold."""
        return self.scores[0].tp if self.scores else 0

    def score(self, threshold):
        for score in self.scores:
            if score.threshold == threshold:
                return score
        raise KeyError(threshold)


@dataclass
class MetricsReport:
    images: list = field(default_factory=list)
    thresholds: tuple = THRESHOLDS
    skipped: list = field(default_factory=list)

    @property
    def miou(self):
        return sum(image.miou for image in self.images) / len(self.images) if self.images else 0.0

    def ap(self, threshold):
        if not self.images:
            return 0.0
        return sum(image.score(threshold).ap for image in self.images) / len(self.images)

    def precision(self, threshold):
        if not self.images:
            return 0.0
        return sum(image.score(threshold).precision for image in self.images) / len(self.images)

    def recall(self, threshold):
        if not self.images:
            return 0.0
        return sum(image.score(threshold).recall for image in self.images) / len(self.images)

    def totals(self, threshold):
        """Summed (tp, fp, fn) over images."""
        scores = [image.score(threshold) for image in self.images]
        return (
            sum(s.tp for s in scores),
            sum(s.fp for s in scores),
            sum(s.fn for s in scores),
        )

    @property
    def segmented(self):
        return sum(image.segmented for image in self.images)

    @property
    def gt_count(self):
        return sum(image.gt_count for image in self.images)


def evaluate_sets(image_id, gt, pred, confidences=None, thresholds=THRESHOLDS):
    if not len(gt):
        raise NoGroundTruthError(image_id)
    candidates = candidate_pairs(gt, pred)
    loose = greedy_match(gt, pred, candidates, 0.0, confidences)
    return ImageMetrics(
        image_id=image_id,
        gt_count=len(gt),
        pred_count=len(pred),
        miou=loose.matched_iou_sum() / len(gt),
        scores=[
            ThresholdScore.from_match(greedy_match(gt, pred, candidates, t, confidences))
            for t in thresholds
        ],
    )


def mean_iou(gt_masks, pred_masks, confidences=None):
    if not gt_masks:
        raise NoGroundTruthError()
    gt, pred = instance_sets(gt_masks, pred_masks)
    loose = greedy_match(gt, pred, candidate_pairs(gt, pred), 0.0, confidences)
    return loose.matched_iou_sum() / len(gt)


def ap_at(gt_masks, pred_masks, threshold, confidences=None):
    if not 0 < threshold < 1:
        raise InputError(f"IoU threshold must be in (0, 1), got {threshold}")
    gt, pred = instance_sets(gt_masks, pred_masks)
    match = greedy_match(gt, pred, candidate_pairs(gt, pred), threshold, confidences)
    return ThresholdScore.from_match(match).ap
