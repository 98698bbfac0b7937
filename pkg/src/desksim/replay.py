"""Deterministic replay: regenerate the frame stream of a logged episode
from its recorded poses, so different agents can be evaluated against
identical conditions and any run can be re-rendered exactly."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import Pose2, Pose3
from .render import (CameraIntrinsics, Renderer, build_static_scene,
                     car_forward_camera, car_scene, uav_gimbal_camera,
                     write_ppm)
from .simlog import SimLog
from .worldmap import extract_path_network, map_digest


class ReplayError(ValueError):
    """Log and map do not belong together, or the log is unusable."""


@dataclass
class ReplayFrame:
    frame_index: int
    sim_time: float
    frame: object          # render.Frame
    record: dict


def _camera_for(kind: str, record: dict):
    if kind == "track":
        u = record["uav"]
        return uav_gimbal_camera(Pose3(u["x"], u["y"], u["z"], u["yaw"]))
    c = record["car"]
    return car_forward_camera(Pose2(c["x"], c["y"], c["psi"]))


def replay(log: SimLog, grid, *, channels=("rgb", "instance"),
           intrinsics: CameraIntrinsics | None = None):
    """Yield one rendered ReplayFrame per log record.

    Tracking logs re-render the UAV gimbal view; driving logs render the car
    forward camera. Raises ReplayError when the log's map digest does not
    match the given map.
    """
    expected = log.header.get("map_sha")
    if expected is not None and expected != map_digest(grid):
        raise ReplayError("log was recorded on a different map "
                          f"(log {expected[:12]}..., given "
                          f"{map_digest(grid)[:12]}...)")
    kind = log.header.get("kind", "drive")
    network = extract_path_network(grid)
    static = build_static_scene(grid, network)
    renderer = Renderer(intrinsics)
    for rec in log.records:
        c = rec["car"]
        scene = static if kind == "drive" else \
            static.merged_with(car_scene(Pose2(c["x"], c["y"], c["psi"])))
        cam = _camera_for(kind, rec)
        frame = renderer.render(scene.tris, scene.colors, scene.ids, cam,
                                channels=channels)
        frame.frame_index = rec["frame"]
        frame.sim_time = rec["t"]
        yield ReplayFrame(rec["frame"], rec["t"], frame, rec)


def replay_file(log_path, grid, out_dir=None, *,
                channels=("rgb",)) -> tuple:
    """Replay a log file; optionally write each frame as P6. Returns
    (n_frames, truncated)."""
    log, truncated = SimLog.load(log_path)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    n = 0
    for rf in replay(log, grid, channels=channels):
        if out is not None:
            write_ppm(out / f"{rf.frame_index:06d}.ppm", rf.frame.rgb)
        n += 1
    return n, truncated
