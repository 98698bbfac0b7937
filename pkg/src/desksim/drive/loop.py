"""Closed-loop waypoint driving: agent label -> control -> bicycle physics,
with online deviation scoring and progress tracking."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Pose2, clamp
from ..physics import CarState, ControlInput, SimClock, step_car
from ..simlog import SimLog, car_record
from .controller import (ControllerParams, DegenerateLabelError,
                         control_from_label, governed_throttle)
from .oracle import AgentLostError
from .scoring import DriveScore, score_deviations

LOST_DEVIATION = 10.0
STEER_SLEW_RATE = 5.0  # normalized steering units per second


@dataclass
class DriveResult:
    log: SimLog
    score: DriveScore
    completion: float
    status: str  # "completed" | "lost" | "frame-limit" | "agent-error"


def _goal_at(path, s: float) -> int:
    spans = path.base.intersection_spans() if hasattr(path, "base") \
        else path.intersection_spans()
    horizon = 8.0
    for s0, s1, branch in spans:
        if s + horizon >= s0 and s <= s1:
            return branch
    return 0


def run_driving_episode(path, agent, target_speed: float, *,
                        score_path=None, laps: float = 1.0,
                        max_frames: int | None = None,
                        start_s: float = 0.0,
                        lane_schedule: dict | None = None,
                        controller_params: ControllerParams = ControllerParams(),
                        header_extra: dict | None = None) -> DriveResult:
    """Drive an agent around a pathway at a speed preset.

    path: the lane pathway the agent follows (Chain or OffsetPath).
    score_path: pathway deviations are measured against (defaults to path).
    lane_schedule: optional {frame_index: "left"|"right"} lane-change events.
    """
    score_path = score_path if score_path is not None else path
    clock = SimClock()
    total = path.total_length * laps
    if max_frames is None:
        max_frames = int((total / max(target_speed, 0.5) * 3.0 + 30.0)
                         * clock.frame_rate)
    car = CarState(pose=path.pose_at(start_s), speed=0.0)
    header = {"kind": "drive", "speed": target_speed, "laps": laps,
              "path_length": path.total_length}
    header.update(header_extra or {})
    log = SimLog(header)
    deviations = []
    progress = 0.0
    last_s = start_s
    steering = 0.0
    status = "frame-limit"
    while clock.frame_index < max_frames:
        goal = _goal_at(path, (start_s + progress) % path.total_length)
        if lane_schedule and clock.frame_index in lane_schedule:
            agent.set_lane(lane_schedule[clock.frame_index])
        try:
            label = agent.label(car.pose)
            control = control_from_label(label, controller_params)
        except DegenerateLabelError:
            label = None
            control = ControlInput(0.0, 0.0)
        except AgentLostError:
            status = "agent-error"
            break
        max_step = STEER_SLEW_RATE * clock.frame_period
        steering += clamp(control.steering - steering, -max_step, max_step)
        throttle = governed_throttle(control.throttle, car.speed, target_speed)
        applied = ControlInput(steering, throttle)
        for _ in range(clock.substeps):
            car = step_car(car, applied, clock.substep_dt)
        s, deviation = score_path.project(car.pose.x, car.pose.y)
        deviations.append(deviation)
        ds = s - last_s
        if score_path.closed:
            L = score_path.total_length
            ds = (ds + L / 2.0) % L - L / 2.0
        if abs(ds) < 5.0:
            progress += ds
        last_s = s
        log.append({
            "frame": clock.frame_index,
            "t": clock.sim_time,
            "car": car_record(car.pose, car.speed),
            "control": {"steer": applied.steering, "throttle": applied.throttle},
            "label": list(label.flat()) if label is not None else None,
            "goal": goal,
            "deviation": deviation,
        })
        clock.advance()
        if deviation > LOST_DEVIATION:
            status = "lost"
            break
        if progress >= total:
            status = "completed"
            break
    score = score_deviations(deviations) if deviations else None
    completion = clamp(progress / total, 0.0, 1.0) if total > 0 else 0.0
    log.header["status"] = status
    log.header["completion"] = completion
    return DriveResult(log=log, score=score, completion=completion, status=status)
