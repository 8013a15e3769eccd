"""Dataset-level evaluation, prediction loading and report output."""
import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from loguru import logger
from marshmallow import Schema, ValidationError, fields, validate
from rich.table import Table

from ..exceptions import DatasetMismatchError, EvaluationError, InputError, NoGroundTruthError
from ..rendering.exports import dataset_image_ids
from ..rendering.exceptions import PgmFormatError
from ..rendering.graymap import read_pgm
from ..rendering.metadata import RunLengthSchema, read_metadata
from ..util import flatten_messages, write_json
from .matching import InstanceSet
from .metrics import THRESHOLDS, MetricsReport, evaluate_sets

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"
NON_PREDICTION_STEMS = {"report", "manifest", "splits"}


class PredictedInstanceSchema(Schema):
    rle = fields.Nested(RunLengthSchema, required=True)
    confidence = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, max=1))


class PredictionDocumentSchema(Schema):
    image_id = fields.String(load_default=None, allow_none=True)
    instances = fields.List(fields.Nested(PredictedInstanceSchema), required=True)


prediction_document_schema = PredictionDocumentSchema()


def prediction_ids(pred_dir):
    pred_dir = Path(pred_dir)
    if not pred_dir.is_dir():
        raise InputError(f"not a directory: {pred_dir}")
    stems = {p.stem for p in pred_dir.iterdir() if p.suffix in (".pgm", ".json")}
    return sorted(stems - NON_PREDICTION_STEMS)


def _prediction_path(pred_dir, image_id):
    pgm = Path(pred_dir) / f"{image_id}.pgm"
    return pgm if pgm.exists() else Path(pred_dir) / f"{image_id}.json"


def load_prediction(path, width, height):
    """(InstanceSet, confidences or None) from a graymap or an RLE prediction document."""
    path = Path(path)
    try:
        if path.suffix == ".pgm":
            graymap = read_pgm(path)
        else:
            with open(path) as f:
                document = prediction_document_schema.load(json.load(f))
    except (OSError, json.JSONDecodeError, PgmFormatError) as e:
        raise EvaluationError(f"unreadable prediction file {path}: {e}")
    except ValidationError as e:
        names = ", ".join(sorted(flatten_messages(e.messages)))
        raise EvaluationError(f"unreadable prediction file {path}: invalid fields {names}")

    if path.suffix == ".pgm":
        if (graymap.width, graymap.height) != (width, height):
            raise EvaluationError(
                f"prediction {path} is {graymap.width}x{graymap.height}, expected {width}x{height}"
            )
        return InstanceSet.from_labels(graymap.ids), None

    instances = document["instances"]
    for instance in instances:
        if instance["rle"]["size"] != [height, width]:
            raise EvaluationError(f"prediction {path} has a mask sized {instance['rle']['size']}")
    confidences = [instance["confidence"] for instance in instances]
    if any(c is None for c in confidences):
        if any(c is not None for c in confidences):
            raise EvaluationError(f"prediction {path}: confidences must cover all masks or none")
        confidences = None
    runs = [instance["rle"]["runs"] for instance in instances]
    return InstanceSet.from_runs(runs, width, height), confidences


def filter_max_area(pred, confidences, max_area_fraction):
    """Drop predicted masks covering more than ``max_area_fraction`` of the canvas."""
    keep = pred.areas <= max_area_fraction * pred.width * pred.height
    if keep.all():
        return pred, confidences
    logger.debug("Dropping {count} oversized predictions", count=int((~keep).sum()))
    if confidences is not None:
        confidences = [c for c, k in zip(confidences, keep) if k]
    return pred.select(keep), confidences


def load_ground_truth(gt_dir, image_id, amodal=False):
    record = read_metadata(Path(gt_dir) / f"{image_id}.json")
    if amodal:
        gt = InstanceSet.from_runs(
            [instance.amodal_rle for instance in record.instances],
            record.width,
            record.height,
            ids=record.instance_ids(),
        )
    else:
        graymap = read_pgm(Path(gt_dir) / f"{image_id}.pgm")
        gt = InstanceSet.from_labels(graymap.ids)
    return gt, record


def evaluate_image(gt_dir, pred_dir, image_id, amodal=False, max_area_fraction=None):
    gt, record = load_ground_truth(gt_dir, image_id, amodal=amodal)
    pred, confidences = load_prediction(_prediction_path(pred_dir, image_id), record.width, record.height)
    if max_area_fraction is not None:
        pred, confidences = filter_max_area(pred, confidences, max_area_fraction)
    try:
        return evaluate_sets(image_id, gt, pred, confidences)
    except NoGroundTruthError:
        return None


def evaluate_dataset(gt_dir, pred_dir, amodal=False, max_area_fraction=None, jobs=1):
    gt_ids = dataset_image_ids(gt_dir)
    if not gt_ids:
        raise InputError(f"no ground-truth images in {gt_dir}")
    if max_area_fraction is not None and not 0 < max_area_fraction <= 1:
        raise InputError(f"max_area_fraction must be in (0, 1], got {max_area_fraction}")

    pred_ids = set(prediction_ids(pred_dir))
    missing = [image_id for image_id in gt_ids if image_id not in pred_ids]
    if missing:
        raise DatasetMismatchError(missing, pred_ids - set(gt_ids))
    extra = sorted(pred_ids - set(gt_ids))
    if extra:
        logger.warning("Ignoring predictions without ground truth: {extra}", extra=", ".join(extra))

    args = ([gt_dir] * len(gt_ids), [pred_dir] * len(gt_ids), gt_ids)
    options = ([amodal] * len(gt_ids), [max_area_fraction] * len(gt_ids))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(evaluate_image, *args, *options))
    else:
        results = list(map(evaluate_image, *args, *options))

    report = MetricsReport()
    for image_id, metrics in zip(gt_ids, results):
        if metrics is None:
            logger.warning("Skipping {image_id}: no ground truth instances", image_id=image_id)
            report.skipped.append(image_id)
        else:
            report.images.append(metrics)
    if not report.images:
        raise NoGroundTruthError()
    return report


def _percent(value):
    return f"{100 * value:.2f}"


def column_names(thresholds=THRESHOLDS):
    return ["mIoU"] + [f"mAP{round(100 * t)}" for t in thresholds]


class ThresholdScoreSchema(Schema):
    threshold = fields.Float()
    tp = fields.Int()
    fp = fields.Int()
    fn = fields.Int()
    precision = fields.Float()
    recall = fields.Float()
    ap = fields.Float()


class ImageMetricsSchema(Schema):
    image_id = fields.String()
    gt_count = fields.Int()
    pred_count = fields.Int()
    segmented = fields.Int()
    miou = fields.Float()
    scores = fields.List(fields.Nested(ThresholdScoreSchema))


class ReportSchema(Schema):
    aggregate = fields.Dict()
    images = fields.List(fields.Nested(ImageMetricsSchema))
    skipped = fields.List(fields.String())


report_schema = ReportSchema()


def aggregate_dict(report):
    return {
        "images": len(report.images),
        "gt_count": report.gt_count,
        "segmented": report.segmented,
        "miou": report.miou,
        "scores": [
            dict(
                zip(
                    ("threshold", "tp", "fp", "fn", "precision", "recall", "ap"),
                    (t, *report.totals(t), report.precision(t), report.recall(t), report.ap(t)),
                )
            )
            for t in report.thresholds
        ],
    }


def write_report_json(report, path):
    write_json(
        path,
        report_schema.dump(
            {"aggregate": aggregate_dict(report), "images": report.images, "skipped": report.skipped}
        ),
    )


def table_rows(report):
    """Per-image rows then the aggregate row, percentages in column order mIoU, mAP50..mAP90."""
    rows = []
    for image in report.images:
        values = [image.miou] + [image.score(t).ap for t in report.thresholds]
        rows.append([image.image_id, *map(_percent, values), f"{image.segmented}/{image.gt_count}"])
    values = [report.miou] + [report.ap(t) for t in report.thresholds]
    rows.append(["mean", *map(_percent, values), f"{report.segmented}/{report.gt_count}"])
    return rows


def header(report):
    return ["image_id", *column_names(report.thresholds), "segmented/gt"]


def write_report_csv(report, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header(report))
        writer.writerows(table_rows(report))


def report_table(report, title="Evaluation"):
    table = Table(title=title)
    for index, name in enumerate(header(report)):
        table.add_column(name, justify="left" if index == 0 else "right")
    rows = table_rows(report)
    for row in rows[:-1]:
        table.add_row(*row)
    table.add_row(*rows[-1], style="bold")
    return table
