from .matching import InstanceSet, MatchResult, match_instances
from .metrics import THRESHOLDS, MetricsReport, ap_at, mean_iou
from .reports import evaluate_dataset
