"""Waypoint labels: 4 (horizontal, rightward-positive; vertical,
forward-positive) offset pairs encoding the path 2-8 m ahead of a view pose."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import Pose2, Vec2, frame_to_world, transform_to_frame

WAYPOINT_DISTANCES = (2.0, 4.0, 6.0, 8.0)


@dataclass(frozen=True)
class WaypointLabel:
    h: tuple  # horizontal offsets, meters, rightward-positive
    v: tuple  # vertical offsets, meters, forward-positive

    def __post_init__(self):
        if len(self.h) != 4 or len(self.v) != 4:
            raise ValueError("waypoint label requires 4 offset pairs")
        if not all(math.isfinite(x) for x in (*self.h, *self.v)):
            raise ValueError("waypoint label offsets must be finite")

    def flat(self) -> tuple:
        """(h1, v1, h2, v2, h3, v3, h4, v4)."""
        return tuple(x for pair in zip(self.h, self.v) for x in pair)


def select_waypoints(path, s: float) -> list:
    """World points at arc positions s+2, s+4, s+6, s+8 on a path.

    Closed paths wrap around; open paths must extend to s+8.
    """
    if not path.closed and s + WAYPOINT_DISTANCES[-1] > path.total_length + 1e-9:
        raise ValueError(
            f"open path too short: need arc length {s + WAYPOINT_DISTANCES[-1]:.3f}, "
            f"have {path.total_length:.3f}")
    pts = []
    for d in WAYPOINT_DISTANCES:
        x, y = path.point_at(s + d)
        pts.append(Vec2(x, y))
    return pts


def encode_label(view_pose: Pose2, waypoints) -> WaypointLabel:
    """Project waypoints onto the view axis of view_pose."""
    hs, vs = [], []
    for wp in waypoints:
        forward, rightward = transform_to_frame(view_pose, wp)
        hs.append(rightward)
        vs.append(forward)
    return WaypointLabel(tuple(hs), tuple(vs))


def decode_label(view_pose: Pose2, label: WaypointLabel) -> list:
    """Inverse of encode_label: recover world points."""
    return [frame_to_world(view_pose, v, h) for h, v in zip(label.h, label.v)]


def mirror_label(label: WaypointLabel) -> WaypointLabel:
    """Lane-change involution: negate all horizontal offsets."""
    return WaypointLabel(tuple(-h for h in label.h), label.v)
