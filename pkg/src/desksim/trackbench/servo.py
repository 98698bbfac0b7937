"""Visual servoing: bounding-box center pixel error to UAV velocity commands.

Horizontal pixel error maps to lateral velocity, vertical error to forward
velocity (camera pitched down at a fixed angle, altitude held constant),
both clamped to +-8 m/s."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import PidController, clamp
from ..render import BBox, CameraIntrinsics, UAV_CAMERA_PITCH

MAX_SERVO_SPEED = 8.0


@dataclass(frozen=True)
class ServoGains:
    """PID gains in (m/s per meter of ground offset); pixel errors are scaled
    by the slant-range ground resolution before entering the PIDs so tuning
    is independent of intrinsics and altitude."""
    kp: float = 3.2
    ki: float = 0.6
    kd: float = 0.4
    integral_clamp: float = 10.0


class ServoController:
    """PIDs on bbox-center pixel error; with no accumulated error the command
    is exactly zero (integrators start and stay drained at steady state)."""

    def __init__(self, intrinsics: CameraIntrinsics | None = None,
                 gains: ServoGains | None = None,
                 altitude: float = 15.0,
                 camera_pitch: float = UAV_CAMERA_PITCH):
        self.intrinsics = intrinsics or CameraIntrinsics()
        slant = altitude / math.sin(camera_pitch)
        self.m_per_px = slant / self.intrinsics.focal_px
        g = gains or ServoGains()
        self.pid_x = PidController(g.kp, g.ki, g.kd,
                                   integral_clamp=g.integral_clamp,
                                   output_clamp=MAX_SERVO_SPEED)
        self.pid_y = PidController(g.kp, g.ki, g.kd,
                                   integral_clamp=g.integral_clamp,
                                   output_clamp=MAX_SERVO_SPEED)

    def update(self, box: BBox | None, dt: float) -> tuple:
        """Returns (lateral, forward) m/s in the camera yaw frame, rightward
        and camera-forward positive. A missing box holds position (zero
        command, integrators untouched)."""
        if box is None:
            return 0.0, 0.0
        cx, cy = box.center
        err_x = (cx - self.intrinsics.cx) * self.m_per_px   # target to the right
        err_y = (self.intrinsics.cy - cy) * self.m_per_px   # target far ahead
        lateral = self.pid_x.update(err_x, dt)
        forward = self.pid_y.update(err_y, dt)
        return (clamp(lateral, -MAX_SERVO_SPEED, MAX_SERVO_SPEED),
                clamp(forward, -MAX_SERVO_SPEED, MAX_SERVO_SPEED))
