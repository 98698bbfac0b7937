from .controller import (ControllerParams, DegenerateLabelError,
                         control_from_label, governed_throttle)
from .dataset import (AugmentationConfig, MANIFEST_HEADER, STEP_STRAIGHT,
                      STEP_TURN, X_OFFSET_RANGE, YAW_OFFSET_RANGE,
                      export_driving_dataset)
from .labels import (WAYPOINT_DISTANCES, WaypointLabel, decode_label,
                     encode_label, mirror_label, select_waypoints)
from .loop import DriveResult, run_driving_episode
from .oracle import AgentLostError, OracleDriver
from .scoring import (BIN_SIZE, CRITICAL_DEVIATION, DriveScore,
                      score_deviations, score_drive)

__all__ = [
    "ControllerParams", "DegenerateLabelError", "control_from_label",
    "governed_throttle",
    "AugmentationConfig", "MANIFEST_HEADER", "STEP_STRAIGHT", "STEP_TURN",
    "X_OFFSET_RANGE", "YAW_OFFSET_RANGE", "export_driving_dataset",
    "WAYPOINT_DISTANCES", "WaypointLabel", "decode_label", "encode_label",
    "mirror_label", "select_waypoints",
    "DriveResult", "run_driving_episode",
    "AgentLostError", "OracleDriver",
    "BIN_SIZE", "CRITICAL_DEVIATION", "DriveScore", "score_deviations",
    "score_drive",
]
