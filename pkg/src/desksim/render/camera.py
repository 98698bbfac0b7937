"""Pinhole camera model, vehicle camera rigs, and view-augmentation poses."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Pose2, Pose3


@dataclass(frozen=True)
class CameraIntrinsics:
    width: int = 320
    height: int = 180
    hfov: float = math.radians(90.0)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or not 0 < self.hfov < math.pi:
            raise ValueError("bad camera intrinsics")

    @property
    def focal_px(self) -> float:
        return (self.width / 2.0) / math.tan(self.hfov / 2.0)

    @property
    def vfov(self) -> float:
        return 2.0 * math.atan((self.height / 2.0) / self.focal_px)

    @property
    def cx(self) -> float:
        return self.width / 2.0

    @property
    def cy(self) -> float:
        return self.height / 2.0


UAV_CAMERA_PITCH = math.radians(60.0)  # fixed, below horizontal
CAR_CAMERA_HEIGHT = 1.2                # hood height, config default


@dataclass(frozen=True)
class CameraPose:
    """Camera position and orientation (yaw CCW from +x, pitch down-positive)."""

    x: float
    y: float
    z: float
    yaw: float
    pitch: float = 0.0

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, down, forward) unit vectors in world coordinates."""
        cy, sy = math.cos(self.yaw), math.sin(self.yaw)
        cp, sp = math.cos(self.pitch), math.sin(self.pitch)
        forward = np.array([cy * cp, sy * cp, -sp])
        right = np.array([sy, -cy, 0.0])
        down = np.cross(forward, right)
        return right, down, forward

    @property
    def eye(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def uav_gimbal_camera(pose: Pose3) -> CameraPose:
    """Camera carried by the UAV: pitched 60 deg below horizontal, yaw
    follows the vehicle."""
    return CameraPose(pose.x, pose.y, pose.z, pose.yaw, UAV_CAMERA_PITCH)


def car_forward_camera(pose: Pose2, height: float = CAR_CAMERA_HEIGHT) -> CameraPose:
    """Forward camera at hood height, zero pitch."""
    return CameraPose(pose.x, pose.y, height, pose.heading, 0.0)


def augmented_camera_pose(base: Pose2, x_offset: float, yaw_offset: float) -> Pose2:
    """Displace a sampling pose sideways (rightward-positive x_offset) and
    rotate it (CCW-positive yaw_offset)."""
    if not (math.isfinite(x_offset) and math.isfinite(yaw_offset)):
        raise ValueError("offsets must be finite")
    r = base.rightward()
    return Pose2(base.x + x_offset * r.x, base.y + x_offset * r.y,
                 base.heading + yaw_offset)


def project_points(cam: CameraPose, intr: CameraIntrinsics,
                   pts: np.ndarray) -> np.ndarray:
    """Project world points (N,3) to pixel coords (N,3): (px, py, depth).

    Depth is planar (distance along the camera forward axis). Points behind
    the camera get depth <= 0; callers must cull them.
    """
    right, down, forward = cam.basis()
    rel = pts - cam.eye
    X = rel @ right
    Y = rel @ down
    Z = rel @ forward
    with np.errstate(divide="ignore", invalid="ignore"):
        px = intr.cx + intr.focal_px * X / Z
        py = intr.cy + intr.focal_px * Y / Z
    return np.stack([px, py, Z], axis=-1)
