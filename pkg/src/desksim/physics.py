"""Fixed-timestep vehicle physics: kinematic bicycle car and a tilt-based
point-mass quadcopter stabilized by PID velocity/altitude loops.

The simulation runs at 30 frames/s with 8 physics substeps per frame
(dt = 1/240 s, explicit Euler).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .core import PidController, Pose2, Pose3, clamp, normalize_angle

GRAVITY = 9.81

FRAME_RATE = 30
SUBSTEPS = 8
SUBSTEP_DT = 1.0 / (FRAME_RATE * SUBSTEPS)


@dataclass
class SimClock:
    """Frame counter with drift-free rational time (frame_index / frame_rate)."""

    frame_rate: int = FRAME_RATE
    substeps: int = SUBSTEPS
    frame_index: int = 0

    @property
    def sim_time(self) -> float:
        return self.frame_index / self.frame_rate

    @property
    def frame_period(self) -> float:
        return 1.0 / self.frame_rate

    @property
    def substep_dt(self) -> float:
        return 1.0 / (self.frame_rate * self.substeps)

    def advance(self) -> None:
        self.frame_index += 1


@dataclass(frozen=True)
class CarParams:
    wheelbase: float = 2.5
    width: float = 2.0
    length: float = 4.5
    max_steer: float = math.radians(35.0)
    max_accel: float = 4.0
    drag: float = 0.4          # 1/s; terminal speed = max_accel / drag


@dataclass(frozen=True)
class CarState:
    pose: Pose2
    speed: float = 0.0
    params: CarParams = field(default=CarParams())


@dataclass(frozen=True)
class ControlInput:
    """Normalized control: steering in [-1, 1] (scales to +-max_steer),
    throttle in [0, 1]."""

    steering: float = 0.0
    throttle: float = 0.0

    def clamped(self) -> "ControlInput":
        return ControlInput(clamp(self.steering, -1.0, 1.0),
                            clamp(self.throttle, 0.0, 1.0))


def step_car(state: CarState, control: ControlInput, dt: float) -> CarState:
    """One explicit-Euler substep of the kinematic bicycle model."""
    if not 0.0 < dt <= 1.0 / 60.0:
        raise ValueError("car substep dt out of range (0, 1/60]")
    c = control.clamped()
    p = state.params
    delta = c.steering * p.max_steer
    v = state.speed
    x = state.pose.x + v * math.cos(state.pose.heading) * dt
    y = state.pose.y + v * math.sin(state.pose.heading) * dt
    # positive steering turns rightward (clockwise, i.e. heading decreases)
    heading = normalize_angle(state.pose.heading - v * math.tan(delta) / p.wheelbase * dt)
    v = max(0.0, v + (c.throttle * p.max_accel - p.drag * v) * dt)
    return replace(state, pose=Pose2(x, y, heading), speed=v)


@dataclass(frozen=True)
class UavParams:
    max_tilt: float = math.radians(25.0)
    max_cmd_speed: float = 12.0
    damping_xy: float = 0.25   # 1/s
    damping_z: float = 1.2
    altitude_setpoint: float = 15.0
    # velocity PIDs output tilt (rad); tuned for the shipped step-response tests
    vel_kp: float = 0.50
    vel_ki: float = 0.12
    vel_kd: float = 0.12
    vel_integral_clamp: float = 4.0
    alt_kp: float = 4.0
    alt_ki: float = 0.0
    alt_kd: float = 2.8
    alt_integral_clamp: float = 4.0
    alt_accel_clamp: float = 6.0


@dataclass
class UavState:
    pose: Pose3
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    roll: float = 0.0    # commanded tilt about x (drives y acceleration)
    pitch: float = 0.0   # commanded tilt about y (drives x acceleration)
    params: UavParams = field(default_factory=UavParams)
    pid_vx: PidController = field(default=None)
    pid_vy: PidController = field(default=None)
    pid_alt: PidController = field(default=None)

    def __post_init__(self):
        p = self.params
        mk_vel = lambda: PidController(p.vel_kp, p.vel_ki, p.vel_kd,
                                       integral_clamp=p.vel_integral_clamp,
                                       output_clamp=p.max_tilt)
        if self.pid_vx is None:
            self.pid_vx = mk_vel()
        if self.pid_vy is None:
            self.pid_vy = mk_vel()
        if self.pid_alt is None:
            self.pid_alt = PidController(p.alt_kp, p.alt_ki, p.alt_kd,
                                         integral_clamp=p.alt_integral_clamp,
                                         output_clamp=p.alt_accel_clamp)


def step_uav(state: UavState, cmd_vx: float, cmd_vy: float, dt: float) -> UavState:
    """One substep: velocity PIDs command tilt, tilt produces horizontal
    acceleration g*tan(tilt), the altitude PID fights gravity. Mutates and
    returns the state (PID controllers are stateful)."""
    if not 0.0 < dt <= 1.0 / 60.0:
        raise ValueError("uav substep dt out of range (0, 1/60]")
    p = state.params
    cmd_vx = clamp(cmd_vx, -p.max_cmd_speed, p.max_cmd_speed)
    cmd_vy = clamp(cmd_vy, -p.max_cmd_speed, p.max_cmd_speed)
    state.pitch = state.pid_vx.update(cmd_vx - state.vx, dt)
    state.roll = state.pid_vy.update(cmd_vy - state.vy, dt)
    ax = GRAVITY * math.tan(state.pitch) - p.damping_xy * state.vx
    ay = GRAVITY * math.tan(state.roll) - p.damping_xy * state.vy
    az = state.pid_alt.update(p.altitude_setpoint - state.pose.z, dt) - p.damping_z * state.vz
    state.vx += ax * dt
    state.vy += ay * dt
    state.vz += az * dt
    z = max(0.0, state.pose.z + state.vz * dt)
    state.pose = Pose3(state.pose.x + state.vx * dt,
                       state.pose.y + state.vy * dt,
                       z, state.pose.yaw)
    return state


def hover_uav(x: float = 0.0, y: float = 0.0, params: UavParams | None = None) -> UavState:
    p = params or UavParams()
    return UavState(pose=Pose3(x, y, p.altitude_setpoint, 0.0), params=p)
