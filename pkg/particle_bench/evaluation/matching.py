"""One-to-one instance matching by IoU.

Masks are held as rows of a sparse instance-by-pixel incidence matrix, so the
intersections of every gt/pred pair come out of one sparse product.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..exceptions import GeometryError
from ..rendering.rle import runs_to_indices


class InstanceSet:
    """Instances of one canvas: ids plus a CSR incidence matrix (instance x pixel)."""

    def __init__(self, ids, incidence, width, height):
        self.ids = list(ids)
        self.incidence = incidence
        self.width = width
        self.height = height
        self.areas = np.asarray(incidence.sum(axis=1)).ravel().astype(np.int64)

    def __len__(self):
        return len(self.ids)

    @property
    def shape(self):
        return self.height, self.width

    @classmethod
    def from_pixel_lists(cls, ids, pixel_lists, width, height):
        rows = np.concatenate(
            [np.full(len(pixels), row, dtype=np.int64) for row, pixels in enumerate(pixel_lists)]
            or [np.zeros(0, dtype=np.int64)]
        )
        cols = np.concatenate(
            [np.asarray(pixels, dtype=np.int64) for pixels in pixel_lists] or [np.zeros(0, dtype=np.int64)]
        )
        incidence = sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int32), (rows, cols)),
            shape=(len(pixel_lists), width * height),
        )
        return cls(ids, incidence, width, height)

    @classmethod
    def from_masks(cls, masks, ids=None):
        if not masks:
            raise GeometryError("cannot infer canvas dimensions from an empty mask list")
        height, width = masks[0].shape
        for mask in masks:
            if mask.shape != (height, width):
                raise GeometryError(f"mask dimensions differ: {mask.shape} vs {(height, width)}")
        ids = list(ids) if ids is not None else list(range(1, len(masks) + 1))
        return cls.from_pixel_lists(ids, [np.flatnonzero(m.bits) for m in masks], width, height)

    @classmethod
    def from_labels(cls, labels):
        """Every nonzero label of a 2-D raster becomes one instance, in ascending id order."""
        labels = np.asarray(labels)
        height, width = labels.shape
        flat = labels.ravel()
        pixels = np.flatnonzero(flat)
        present = np.unique(flat[pixels])
        rows = np.searchsorted(present, flat[pixels])
        incidence = sparse.csr_matrix(
            (np.ones(pixels.size, dtype=np.int32), (rows, pixels)),
            shape=(present.size, width * height),
        )
        return cls([int(i) for i in present], incidence, width, height)

    @classmethod
    def from_runs(cls, runs_list, width, height, ids=None):
        ids = list(ids) if ids is not None else list(range(1, len(runs_list) + 1))
        return cls.from_pixel_lists(ids, [runs_to_indices(runs) for runs in runs_list], width, height)

    @classmethod
    def empty(cls, width, height):
        return cls([], sparse.csr_matrix((0, width * height), dtype=np.int32), width, height)

    def select(self, keep):
        keep = np.asarray(keep, dtype=bool)
        return InstanceSet(
            [i for i, k in zip(self.ids, keep) if k], self.incidence[keep], self.width, self.height
        )


@dataclass
class Candidates:
    """Every gt/pred pair with positive overlap, by position in the two sets."""

    gt: np.ndarray
    pred: np.ndarray
    iou: np.ndarray


def candidate_pairs(gt, pred):
    if gt.shape != pred.shape:
        raise GeometryError(f"canvas dimensions differ: gt {gt.shape}, pred {pred.shape}")
    if not len(gt) or not len(pred):
        empty = np.zeros(0, dtype=np.int64)
        return Candidates(empty, empty, np.zeros(0))

    intersections = (gt.incidence @ pred.incidence.T).tocoo()
    inter = intersections.data.astype(np.int64)
    union = gt.areas[intersections.row] + pred.areas[intersections.col] - inter
    keep = inter > 0
    return Candidates(
        gt=intersections.row[keep].astype(np.int64),
        pred=intersections.col[keep].astype(np.int64),
        iou=inter[keep] / union[keep],
    )


@dataclass
class MatchResult:
    threshold: float
    pairs: list = field(default_factory=list)
    unmatched_gt: list = field(default_factory=list)
    unmatched_pred: list = field(default_factory=list)

    @property
    def tp(self):
        return len(self.pairs)

    @property
    def fp(self):
        return len(self.unmatched_pred)

    @property
    def fn(self):
        return len(self.unmatched_gt)

    def matched_iou_sum(self):
        return float(sum(iou for _, _, iou in self.pairs))


def greedy_match(gt, pred, candidates, threshold, confidences=None):
    """Accept pairs in descending IoU; ties go to higher confidence, then lower gt id, then lower pred index."""
    eligible = candidates.iou >= threshold
    gt_pos, pred_pos, ious = candidates.gt[eligible], candidates.pred[eligible], candidates.iou[eligible]

    gt_ids = np.asarray(gt.ids, dtype=np.int64)
    confidence = (
        np.asarray(confidences, dtype=float)[pred_pos] if confidences is not None else np.zeros(pred_pos.size)
    )
    order = np.lexsort((pred_pos, gt_ids[gt_pos], -confidence, -ious))

    gt_used = np.zeros(len(gt), dtype=bool)
    pred_used = np.zeros(len(pred), dtype=bool)
    result = MatchResult(threshold=threshold)
    for k in order:
        g, p = gt_pos[k], pred_pos[k]
        if gt_used[g] or pred_used[p]:
            continue
        gt_used[g] = pred_used[p] = True
        result.pairs.append((gt.ids[g], int(p), float(ious[k])))

    result.unmatched_gt = [gt.ids[g] for g in np.flatnonzero(~gt_used)]
    result.unmatched_pred = [int(p) for p in np.flatnonzero(~pred_used)]
    return result


def match_sets(gt, pred, threshold, confidences=None):
    return greedy_match(gt, pred, candidate_pairs(gt, pred), threshold, confidences)


def _as_set(masks, like=None, ids=None):
    if masks:
        return InstanceSet.from_masks(masks, ids=ids)
    if like is None:
        raise GeometryError("cannot infer canvas dimensions without any masks")
    return InstanceSet.empty(like.width, like.height)


def instance_sets(gt_masks, pred_masks, gt_ids=None):
    if gt_masks:
        gt = InstanceSet.from_masks(gt_masks, ids=gt_ids)
        return gt, _as_set(pred_masks, like=gt)
    pred = _as_set(pred_masks)
    return _as_set(gt_masks, like=pred), pred


def match_instances(gt_masks, pred_masks, threshold, confidences=None, gt_ids=None):
    """Match lists of canvas-frame BinaryMasks; gt ids default to 1..N."""
    gt, pred = instance_sets(gt_masks, pred_masks, gt_ids=gt_ids)
    return match_sets(gt, pred, threshold, confidences)
