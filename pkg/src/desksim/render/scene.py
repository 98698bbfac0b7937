"""Procedural scene geometry derived from a GridMap: road quads with lane
markings, houses as boxes, trees as cone+trunk, obstacle and car boxes."""

from __future__ import annotations

import math

import numpy as np

from ..core import Pose2
from ..worldmap.grid import GridMap
from ..worldmap.paths import PathNetwork

CAR_ID = 1
OBSTACLE_ID_BASE = 10
SCENERY_ID_BASE = 100

_PALETTES = {
    "desert": {"ground": (194, 178, 128), "road": (70, 68, 66),
               "marking": (240, 240, 235), "house": (181, 140, 101),
               "tree": (90, 140, 70), "trunk": (110, 85, 60)},
    "urban": {"ground": (120, 124, 120), "road": (58, 58, 60),
              "marking": (235, 235, 230), "house": (150, 150, 158),
              "tree": (60, 130, 62), "trunk": (100, 80, 58)},
}

HOUSE_HEIGHTS = {0: 4.0, 1: 6.0, 2: 8.0, 3: 10.0}

CAR_COLOR = (200, 40, 40)
OBSTACLE_COLOR = (220, 120, 30)
CAR_LENGTH, CAR_WIDTH, CAR_HEIGHT = 4.5, 2.0, 1.4


class Scene:
    """Immutable triangle soup: (N,3,3) vertices, (N,3) colors, (N,) ids."""

    def __init__(self, tris, colors, ids):
        self.tris = np.asarray(tris, dtype=np.float64).reshape(-1, 3, 3)
        self.colors = np.asarray(colors, dtype=np.uint8).reshape(-1, 3)
        self.ids = np.asarray(ids, dtype=np.uint16).reshape(-1)

    def merged_with(self, other: "Scene") -> "Scene":
        s = Scene.__new__(Scene)
        s.tris = np.concatenate([self.tris, other.tris])
        s.colors = np.concatenate([self.colors, other.colors])
        s.ids = np.concatenate([self.ids, other.ids])
        return s


class _Builder:
    def __init__(self):
        self.tris: list = []
        self.colors: list = []
        self.ids: list = []

    def quad(self, p0, p1, p2, p3, color, oid):
        self.tris.append([p0, p1, p2])
        self.tris.append([p0, p2, p3])
        self.colors += [color, color]
        self.ids += [oid, oid]

    def box(self, cx, cy, z0, z1, hx, hy, yaw, color, oid):
        c, s = math.cos(yaw), math.sin(yaw)
        corners = []
        for dx, dy in ((hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy)):
            corners.append((cx + dx * c - dy * s, cy + dx * s + dy * c))
        lo = [(x, y, z0) for x, y in corners]
        hi = [(x, y, z1) for x, y in corners]
        self.quad(hi[0], hi[1], hi[2], hi[3], color, oid)  # top
        for i in range(4):
            j = (i + 1) % 4
            self.quad(lo[i], lo[j], hi[j], hi[i], color, oid)

    def cone(self, cx, cy, z0, z1, radius, color, oid, sides=6):
        apex = (cx, cy, z1)
        ring = [(cx + radius * math.cos(2 * math.pi * i / sides),
                 cy + radius * math.sin(2 * math.pi * i / sides), z0)
                for i in range(sides)]
        for i in range(sides):
            self.tris.append([ring[i], ring[(i + 1) % sides], apex])
            self.colors.append(color)
            self.ids.append(oid)

    def build(self) -> Scene:
        return Scene(np.array(self.tris), np.array(self.colors),
                     np.array(self.ids))


def _cell_markings(b: _Builder, grid: GridMap, r: int, c: int, color):
    """Dashed centerline markings, slightly above the road surface."""
    cell = grid.cells[r][c]
    cx, cy = grid.cell_center(r, c)
    z = 0.02
    hw = 0.12  # half width of a dash
    if cell.kind in ("straight", "obstacle"):
        for off in (-2.0, 2.0):
            if cell.axis == "NS":
                b.quad((cx - hw, cy + off - 1, z), (cx + hw, cy + off - 1, z),
                       (cx + hw, cy + off + 1, z), (cx - hw, cy + off + 1, z),
                       color, 0)
            else:
                b.quad((cx + off - 1, cy - hw, z), (cx + off + 1, cy - hw, z),
                       (cx + off + 1, cy + hw, z), (cx + off - 1, cy + hw, z),
                       color, 0)
    elif cell.kind == "turn":
        # one short dash at the arc midpoint, tangent-aligned
        half = grid.cell_size / 2.0
        sx = 1.0 if "E" in cell.corner else -1.0
        sy = 1.0 if "N" in cell.corner else -1.0
        kx, ky = cx + sx * half, cy + sy * half
        ang = math.atan2(cy - ky, cx - kx)
        mx, my = kx + half * math.cos(ang), ky + half * math.sin(ang)
        tx, ty = -math.sin(ang), math.cos(ang)
        b.quad((mx - tx - hw * math.cos(ang), my - ty - hw * math.sin(ang), z),
               (mx + tx - hw * math.cos(ang), my + ty - hw * math.sin(ang), z),
               (mx + tx + hw * math.cos(ang), my + ty + hw * math.sin(ang), z),
               (mx - tx + hw * math.cos(ang), my - ty + hw * math.sin(ang), z),
               color, 0)


def build_static_scene(grid: GridMap, network: PathNetwork | None = None) -> Scene:
    pal = _PALETTES[grid.environment_style]
    b = _Builder()
    cs = grid.cell_size
    margin = 30.0 * cs
    b.quad((-margin, -margin, 0.0), (grid.width * cs + margin, -margin, 0.0),
           (grid.width * cs + margin, grid.height * cs + margin, 0.0),
           (-margin, grid.height * cs + margin, 0.0), pal["ground"], 0)
    next_id = SCENERY_ID_BASE
    for r in range(grid.height):
        for c in range(grid.width):
            cell = grid.cells[r][c]
            cx, cy = grid.cell_center(r, c)
            half = cs / 2.0
            if cell.is_road:
                b.quad((cx - half, cy - half, 0.01), (cx + half, cy - half, 0.01),
                       (cx + half, cy + half, 0.01), (cx - half, cy + half, 0.01),
                       pal["road"], 0)
                _cell_markings(b, grid, r, c, pal["marking"])
            elif cell.kind == "house":
                b.box(cx, cy, 0.0, HOUSE_HEIGHTS[cell.variant], 3.0, 3.0, 0.0,
                      pal["house"], next_id)
                next_id += 1
            elif cell.kind == "tree":
                b.box(cx, cy, 0.0, 1.5, 0.25, 0.25, 0.0, pal["trunk"], next_id)
                b.cone(cx, cy, 1.2, 5.0, 1.6, pal["tree"], next_id)
                next_id += 1
    if network is not None:
        for k, (px, py, _s) in enumerate(network.obstacle_positions()):
            b.box(px, py, 0.0, 1.5, 1.0, 1.0, 0.0, OBSTACLE_COLOR,
                  OBSTACLE_ID_BASE + k)
    return b.build()


def car_scene(pose: Pose2, color=CAR_COLOR, oid: int = CAR_ID) -> Scene:
    b = _Builder()
    b.box(pose.x, pose.y, 0.2, CAR_HEIGHT, CAR_LENGTH / 2.0, CAR_WIDTH / 2.0,
          pose.heading, color, oid)
    # cabin lump so the box reads as a vehicle from above
    fb = pose.forward()
    b.box(pose.x - 0.4 * fb.x, pose.y - 0.4 * fb.y, CAR_HEIGHT, CAR_HEIGHT + 0.6,
          1.2, 0.85, pose.heading, (max(0, color[0] - 60), color[1], color[2]), oid)
    return b.build()
