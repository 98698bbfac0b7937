"""Offline one-pass tracking evaluation: precision curve over center-distance
thresholds 0..50 px, success curve over IoU thresholds 0..1 step 0.05, each
summarized by its AUC (mean of curve values on the fixed grid)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..render import BBox

PRECISION_THRESHOLDS = tuple(float(t) for t in range(51))
SUCCESS_THRESHOLDS = tuple(round(0.05 * i, 10) for i in range(21))


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0 when the union is empty."""
    ix = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.area + b.area - inter
    # min/max cancellation can push the ratio epsilon past 1 for equal boxes
    return min(1.0, inter / union) if union > 0.0 else 0.0


def center_distance(a: BBox, b: BBox) -> float:
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def _check_lengths(gt, pred) -> None:
    if len(gt) != len(pred):
        raise ValueError(f"length mismatch: {len(gt)} ground-truth vs "
                         f"{len(pred)} predicted boxes")


def precision_curve(gt, pred) -> tuple:
    """(curve over the 51-point threshold grid, AUC). Missing predictions
    (None) count as failures at every threshold."""
    _check_lengths(gt, pred)
    dists = [center_distance(g, p) if p is not None else math.inf
             for g, p in zip(gt, pred)]
    n = max(len(dists), 1)
    curve = tuple(sum(1 for d in dists if d <= t) / n
                  for t in PRECISION_THRESHOLDS)
    assert all(a <= b + 1e-15 for a, b in zip(curve, curve[1:])), \
        "precision curve must be non-decreasing"
    return curve, sum(curve) / len(curve)


def success_curve(gt, pred) -> tuple:
    """(curve over the 21-point IoU grid, AUC). Success at threshold t means
    IoU strictly greater than t; missing predictions score IoU 0."""
    _check_lengths(gt, pred)
    ious = [iou(g, p) if p is not None else 0.0 for g, p in zip(gt, pred)]
    n = max(len(ious), 1)
    curve = tuple(sum(1 for v in ious if v > t) / n
                  for t in SUCCESS_THRESHOLDS)
    assert all(a >= b - 1e-15 for a, b in zip(curve, curve[1:])), \
        "success curve must be non-increasing"
    return curve, sum(curve) / len(curve)


@dataclass(frozen=True)
class TrackMetrics:
    precision: tuple
    precision_auc: float
    success: tuple
    success_auc: float
    mean_center_distance: float
    n_frames: int

    def to_dict(self) -> dict:
        return {
            "precision_auc": self.precision_auc,
            "success_auc": self.success_auc,
            "mean_center_distance_px": self.mean_center_distance,
            "n_frames": self.n_frames,
            "precision_curve": list(self.precision),
            "success_curve": list(self.success),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def curves_csv(self) -> str:
        """One row per threshold: kind,threshold,value."""
        lines = ["kind,threshold,value"]
        lines += [f"precision,{t:g},{v:.10g}"
                  for t, v in zip(PRECISION_THRESHOLDS, self.precision)]
        lines += [f"success,{t:g},{v:.10g}"
                  for t, v in zip(SUCCESS_THRESHOLDS, self.success)]
        return "\n".join(lines) + "\n"


def evaluate(gt, pred) -> TrackMetrics:
    """Full one-pass evaluation of a prediction series against ground truth."""
    p_curve, p_auc = precision_curve(gt, pred)
    s_curve, s_auc = success_curve(gt, pred)
    dists = [center_distance(g, p) for g, p in zip(gt, pred) if p is not None]
    mean_dist = sum(dists) / len(dists) if dists else math.inf
    return TrackMetrics(precision=p_curve, precision_auc=p_auc,
                        success=s_curve, success_auc=s_auc,
                        mean_center_distance=mean_dist, n_frames=len(gt))
