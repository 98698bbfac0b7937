"""White-box driving agents: the exact path oracle (stand-in for a learned
waypoint predictor) with optional seeded Gaussian corruption, and lane-change
session state."""

from __future__ import annotations

from ..core import Pose2, SeededRng
from .labels import WaypointLabel, encode_label, select_waypoints

LOST_DISTANCE = 10.0


class AgentLostError(RuntimeError):
    """Car is too far from every lane for the oracle to label."""


class OracleDriver:
    """Projects the true car pose onto the lane pathway and emits the exact
    next-4-waypoint label; optionally corrupts each offset with N(0, sigma)."""

    def __init__(self, right_path, left_path=None, sigma: float = 0.0,
                 seed: int = 0, lane: str = "right"):
        self.paths = {"right": right_path, "left": left_path or right_path}
        self.sigma = sigma
        self.rng = SeededRng(seed)
        self.lane = lane

    def set_lane(self, lane: str) -> None:
        if lane not in self.paths:
            raise ValueError(f"unknown lane {lane!r}")
        self.lane = lane

    def toggle_lane(self) -> None:
        self.set_lane("left" if self.lane == "right" else "right")

    def label(self, car_pose: Pose2) -> WaypointLabel:
        path = self.paths[self.lane]
        s, dist = path.project(car_pose.x, car_pose.y)
        if dist > LOST_DISTANCE:
            raise AgentLostError(f"car {dist:.1f} m from the {self.lane} lane")
        wps = select_waypoints(path, s)
        label = encode_label(car_pose, wps)
        if self.sigma > 0.0:
            label = WaypointLabel(
                tuple(h + self.rng.normal(0.0, self.sigma) for h in label.h),
                tuple(v + self.rng.normal(0.0, self.sigma) for v in label.v))
        return label
