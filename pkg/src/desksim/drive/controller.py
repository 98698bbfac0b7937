"""Waypoint label -> steering/throttle, plus the speed-preset governor."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import clamp
from ..physics import CarParams, ControlInput
from .labels import WaypointLabel


class DegenerateLabelError(ValueError):
    """First waypoint not ahead of the car; safe response is to stop."""


@dataclass(frozen=True)
class ControllerParams:
    max_steer: float = CarParams.max_steer
    h_saturation: float = 3.0   # |h4| at which throttle bottoms out
    throttle_min: float = 0.2


def control_from_label(label: WaypointLabel,
                       params: ControllerParams = ControllerParams()) -> ControlInput:
    """Steering from the first waypoint (theta = arctan(h1/v1), clamped and
    normalized by max_steer); throttle falls linearly with |h4|."""
    h1, v1 = label.h[0], label.v[0]
    if v1 <= 0.0:
        raise DegenerateLabelError(f"first waypoint not ahead (v1={v1:.3f})")
    theta = clamp(math.atan2(h1, v1), -params.max_steer, params.max_steer)
    steering = theta / params.max_steer
    throttle = clamp((params.h_saturation - abs(label.h[3])) / params.h_saturation,
                     params.throttle_min, 1.0)
    return ControlInput(steering=steering, throttle=throttle)


def governed_throttle(throttle: float, speed: float, target_speed: float,
                      gain: float = 1.0) -> float:
    """Cap throttle so the car cruises at the episode's speed preset."""
    return min(throttle, clamp(gain * (target_speed - speed), 0.0, 1.0))
