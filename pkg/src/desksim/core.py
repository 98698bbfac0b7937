"""Shared geometry, pose algebra, seeded randomness and the PID primitive.

Conventions used throughout the package:
  * world frame: x east, y north, units in meters
  * heading psi in radians, counterclockwise from +x, normalized to (-pi, pi]
  * "rightward" is the driver's right: (sin psi, -cos psi)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = math.remainder(a, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x - o.x, self.y - o.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, o: "Vec2") -> float:
        return self.x * o.x + self.y * o.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Pose2:
    """Planar pose: position plus heading (CCW from +x)."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.heading)):
            raise ValueError("Pose2 components must be finite")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)

    def forward(self) -> Vec2:
        return Vec2(math.cos(self.heading), math.sin(self.heading))

    def rightward(self) -> Vec2:
        return Vec2(math.sin(self.heading), -math.cos(self.heading))


@dataclass(frozen=True)
class Pose3:
    """UAV pose: 3D position plus yaw. Roll/pitch live in the physics state."""

    x: float
    y: float
    z: float
    yaw: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z, self.yaw):
            if not math.isfinite(v):
                raise ValueError("Pose3 components must be finite")
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))


def transform_to_frame(pose: Pose2, point: Vec2) -> tuple[float, float]:
    """Express a world point in a pose's local frame.

    Returns (forward, rightward): distance ahead along the viewing axis and
    distance to the driver's right along the viewing-axis normal.
    """
    if not (math.isfinite(point.x) and math.isfinite(point.y)):
        raise ValueError("point must be finite")
    dx = point.x - pose.x
    dy = point.y - pose.y
    c, s = math.cos(pose.heading), math.sin(pose.heading)
    forward = dx * c + dy * s
    rightward = dx * s - dy * c
    return forward, rightward


def frame_to_world(pose: Pose2, forward: float, rightward: float) -> Vec2:
    """Inverse of transform_to_frame."""
    c, s = math.cos(pose.heading), math.sin(pose.heading)
    return Vec2(pose.x + forward * c + rightward * s,
                pose.y + forward * s - rightward * c)


@dataclass
class PidController:
    """PID with symmetric integral clamping (anti-windup) and output clamping.

    Derivative acts on the error; dt is supplied by the caller so substeps
    control the update rate.
    """

    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    integral_clamp: float = math.inf
    output_clamp: float = math.inf
    integral_state: float = field(default=0.0)
    previous_error: float = field(default=0.0)

    def update(self, error: float, dt: float) -> float:
        if not math.isfinite(error):
            raise ValueError("non-finite PID error")
        if not math.isfinite(dt) or dt <= 0.0:
            raise ValueError("PID dt must be finite and > 0")
        self.integral_state = clamp(self.integral_state + error * dt,
                                    -self.integral_clamp, self.integral_clamp)
        derivative = (error - self.previous_error) / dt
        self.previous_error = error
        out = self.kp * error + self.ki * self.integral_state + self.kd * derivative
        return clamp(out, -self.output_clamp, self.output_clamp)

    def reset(self) -> None:
        self.integral_state = 0.0
        self.previous_error = 0.0


class SeededRng:
    """Deterministic random source: PCG64 with a 64-bit seed.

    PCG64 is fully specified (O'Neill's pcg64_xsl_rr_128_64 with numpy's
    documented stream setup), so equal seeds produce byte-identical draw
    sequences on every platform.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return float(self._gen.uniform(lo, hi))

    def integers(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        return int(self._gen.integers(lo, hi))

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        return float(self._gen.normal(mu, sigma))

    def choice(self, seq):
        return seq[self.integers(0, len(seq))]

    def shuffle(self, seq: list) -> None:
        # Fisher-Yates on top of integers() keeps the stream layout explicit.
        for i in range(len(seq) - 1, 0, -1):
            j = self.integers(0, i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def bytes(self, n: int) -> bytes:
        return self._gen.bytes(n)

    def spawn(self, tag: int) -> "SeededRng":
        """Independent child stream derived from (seed, tag)."""
        return SeededRng((self.seed * 0x9E3779B97F4A7C15 + tag) & 0xFFFFFFFFFFFFFFFF)
