"""Driving dataset export: sampled ideal-pathway poses rendered from the car
camera plus augmented recovery views, each labeled with the next 4 waypoints
encoded in its own view frame, with an optional goal channel for guided
driving."""

from __future__ import annotations

import csv
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

from ..core import Pose2, SeededRng
from ..render import (CameraIntrinsics, Renderer, augmented_camera_pose,
                      build_static_scene, car_forward_camera, write_ppm)
from ..worldmap import apply_obstacle_reroutes, extract_path_network, sample_path
from .labels import encode_label, select_waypoints

X_OFFSET_RANGE = (-4.0, 4.0)
YAW_OFFSET_RANGE = (-math.radians(30.0), math.radians(30.0))
STEP_STRAIGHT = 0.8
STEP_TURN = 0.2

MANIFEST_HEADER = ["image", "map", "s", "x_off", "yaw_off", "goal",
                   "h1", "v1", "h2", "v2", "h3", "v3", "h4", "v4"]


@dataclass(frozen=True)
class AugmentationConfig:
    """Extra views per sample pose.

    mode "random": `views` draws of (x_offset, yaw_offset) uniform over the
    declared ranges. mode "fixed": one view per (x_offset, yaw_offset) in
    `fixed_offsets`.
    """
    mode: str = "random"
    views: int = 1
    fixed_offsets: tuple = ()
    x_range: tuple = X_OFFSET_RANGE
    yaw_range: tuple = YAW_OFFSET_RANGE
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("random", "fixed"):
            raise ValueError(f"unknown augmentation mode {self.mode!r}")
        for x, yaw in self.fixed_offsets:
            if not (X_OFFSET_RANGE[0] <= x <= X_OFFSET_RANGE[1]
                    and YAW_OFFSET_RANGE[0] <= yaw <= YAW_OFFSET_RANGE[1]):
                raise ValueError(f"fixed offset ({x}, {yaw}) outside the "
                                 "declared augmentation ranges")

    def views_per_sample(self) -> int:
        return self.views if self.mode == "random" else len(self.fixed_offsets)

    def offsets(self, rng: SeededRng) -> list:
        if self.mode == "fixed":
            return [(float(x), float(yaw)) for x, yaw in self.fixed_offsets]
        return [(rng.uniform(*self.x_range), rng.uniform(*self.yaw_range))
                for _ in range(self.views)]


def _cell_is_intersection(grid, x: float, y: float) -> bool:
    col = int(x // grid.cell_size)
    row = int(y // grid.cell_size)
    if not (0 <= row < grid.height and 0 <= col < grid.width):
        return False
    return grid.cells[row][col].kind in ("ix3", "ix4")


def goal_for_sample(grid, path, s: float, waypoints, rng: SeededRng) -> int:
    """Goal channel value: the path's branch direction when the sample pose
    or any of its waypoints sits on an intersection cell, otherwise a random
    draw from {-1, 0, +1} so a learner cannot rely on it off-intersection."""
    px, py = path.point_at(s)
    on_ix = _cell_is_intersection(grid, px, py) or any(
        _cell_is_intersection(grid, wp.x, wp.y) for wp in waypoints)
    if on_ix:
        base = path.base if hasattr(path, "base") else path
        L = base.total_length
        best = 0
        for s0, s1, branch in base.intersection_spans():
            if s0 - 1e-9 <= s % L <= s1 + 1e-9 or s0 - 8.0 <= s % L <= s1:
                best = branch
                break
        return best
    return int(rng.choice((-1, 0, 1)))


def export_driving_dataset(maps, out_dir, *,
                           step_straight: float = STEP_STRAIGHT,
                           step_turn: float = STEP_TURN,
                           augmentation: AugmentationConfig = AugmentationConfig(),
                           with_goals: bool = True,
                           intrinsics: CameraIntrinsics | None = None,
                           seed: int = 0) -> list:
    """Render and label a driving dataset from one or more maps.

    maps: list of (map_id, GridMap). Returns the manifest rows (also written
    to out_dir/manifest.csv); images are P6 files next to it. Obstructed maps
    are labeled against the rerouted (left-shifted) ideal pathway. Output is
    deterministic in (maps, config, seed).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    renderer = Renderer(intrinsics)
    rows = []
    for map_id, grid in maps:
        network = extract_path_network(grid)
        path = apply_obstacle_reroutes(network)
        scene = build_static_scene(grid, network)
        rng = SeededRng(seed).spawn(zlib.crc32(str(map_id).encode("utf-8")))
        aug_rng = rng.spawn(1)
        goal_rng = rng.spawn(2)
        samples = sample_path(path, step_straight, step_turn)
        for i, (pose, s) in enumerate(samples):
            waypoints = select_waypoints(path, s)
            goal = goal_for_sample(grid, path, s, waypoints, goal_rng) \
                if with_goals else 0
            views = [(0.0, 0.0)] + augmentation.offsets(aug_rng)
            for k, (x_off, yaw_off) in enumerate(views):
                view_pose = augmented_camera_pose(pose, x_off, yaw_off) \
                    if (x_off, yaw_off) != (0.0, 0.0) else pose
                label = encode_label(view_pose, waypoints)
                cam = car_forward_camera(view_pose)
                frame = renderer.render(scene.tris, scene.colors, scene.ids,
                                        cam, channels=("rgb",))
                name = f"{map_id}_{i:05d}_{k:02d}.ppm"
                write_ppm(out / name, frame.rgb)
                rows.append([name, str(map_id), f"{s:.6f}",
                             f"{x_off:.6f}", f"{yaw_off:.6f}", str(goal)]
                            + [f"{v:.6f}" for v in label.flat()])
    with open(out / "manifest.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(MANIFEST_HEADER)
        w.writerows(rows)
    return rows
