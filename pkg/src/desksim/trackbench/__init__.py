from .metrics import (PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS, TrackMetrics,
                      center_distance, evaluate, iou, precision_curve,
                      success_curve)
from .online import (AIM_DISTANCE_LIMIT, SPEED_PRESETS, TARGET_ABSENT_LIMIT,
                     TrackResult, export_tracking_dataset, run_online)
from .servo import MAX_SERVO_SPEED, ServoController, ServoGains
from .trackers import (DelayedTracker, FrameMailbox, GroundTruthTracker,
                       NccTemplateTracker, NoisyTracker, Tracker,
                       TrackerSession, make_tracker)

__all__ = [
    "PRECISION_THRESHOLDS", "SUCCESS_THRESHOLDS", "TrackMetrics",
    "center_distance", "evaluate", "iou", "precision_curve", "success_curve",
    "AIM_DISTANCE_LIMIT", "SPEED_PRESETS", "TARGET_ABSENT_LIMIT",
    "TrackResult", "export_tracking_dataset", "run_online",
    "MAX_SERVO_SPEED", "ServoController", "ServoGains",
    "DelayedTracker", "FrameMailbox", "GroundTruthTracker",
    "NccTemplateTracker", "NoisyTracker", "Tracker", "TrackerSession",
    "make_tracker",
]
