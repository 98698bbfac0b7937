"""Directed lane centerlines derived from a GridMap.

Right-hand traffic: each road carries two 4 m lanes offset +-2 m from the
road centerline. Straight cells contribute line segments, turn cells and
intersection branches contribute quarter arcs (radius 2 m inner / 6 m outer).
The "ideal pathway" is the right-lane chain of the default circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import Pose2, Vec2, normalize_angle
from .grid import DIRS, DIR_STEP, GridMap, MapError, OPPOSITE

LANE_OFFSET = 2.0
TWO_PI = 2.0 * math.pi

# unit vector of travel for someone moving toward direction d
_DIR_VEC = {"N": (0.0, 1.0), "S": (0.0, -1.0), "E": (1.0, 0.0), "W": (-1.0, 0.0)}
_LEFT_OF = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT_OF = {"N": "E", "E": "S", "S": "W", "W": "N"}


@dataclass(frozen=True)
class LineSeg:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def heading(self) -> float:
        return math.atan2(self.y1 - self.y0, self.x1 - self.x0)

    def point_at(self, t: float) -> tuple[float, float]:
        L = self.length
        f = t / L if L > 0 else 0.0
        return (self.x0 + (self.x1 - self.x0) * f, self.y0 + (self.y1 - self.y0) * f)

    def heading_at(self, t: float) -> float:
        return self.heading

    def curvature_at(self, t: float) -> float:
        return 0.0

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Return (t, distance) of the closest point."""
        dx, dy = self.x1 - self.x0, self.y1 - self.y0
        L = self.length
        if L == 0:
            return 0.0, math.hypot(x - self.x0, y - self.y0)
        t = ((x - self.x0) * dx + (y - self.y0) * dy) / L
        t = min(max(t, 0.0), L)
        px, py = self.point_at(t)
        return t, math.hypot(x - px, y - py)


@dataclass(frozen=True)
class ArcSeg:
    cx: float
    cy: float
    radius: float
    a0: float       # start angle (radians, world frame)
    sweep: float    # signed; positive = CCW

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def _angle_at(self, t: float) -> float:
        return self.a0 + self.sweep * (t / self.length)

    def point_at(self, t: float) -> tuple[float, float]:
        a = self._angle_at(t)
        return (self.cx + self.radius * math.cos(a), self.cy + self.radius * math.sin(a))

    def heading_at(self, t: float) -> float:
        a = self._angle_at(t)
        s = 1.0 if self.sweep >= 0 else -1.0
        return math.atan2(s * math.cos(a), -s * math.sin(a))

    def curvature_at(self, t: float) -> float:
        return (1.0 if self.sweep >= 0 else -1.0) / self.radius

    def project(self, x: float, y: float) -> tuple[float, float]:
        phi = math.atan2(y - self.cy, x - self.cx)
        if self.sweep >= 0:
            d = (phi - self.a0) % TWO_PI
            inside = d <= self.sweep
        else:
            d = (self.a0 - phi) % TWO_PI
            inside = d <= -self.sweep
        if inside:
            t = d * self.radius
            px, py = self.point_at(t)
            return t, math.hypot(x - px, y - py)
        p0 = self.point_at(0.0)
        p1 = self.point_at(self.length)
        d0 = math.hypot(x - p0[0], y - p0[1])
        d1 = math.hypot(x - p1[0], y - p1[1])
        return (0.0, d0) if d0 <= d1 else (self.length, d1)


@dataclass(frozen=True)
class SegmentInfo:
    row: int
    col: int
    kind: str          # cell kind the segment came from
    branch: int | None  # -1 left / 0 straight / +1 right at intersections


class Chain:
    """Ordered G1-continuous sequence of lane segments with arc-length tables."""

    def __init__(self, segments: list, infos: list, closed: bool):
        if not segments:
            raise MapError("empty lane chain")
        self.segments = segments
        self.infos = infos
        self.closed = closed
        self.cum = [0.0]
        for seg in segments:
            self.cum.append(self.cum[-1] + seg.length)
        self.total_length = self.cum[-1]

    def _locate(self, s: float) -> tuple[int, float]:
        if self.closed:
            s = s % self.total_length
        else:
            s = min(max(s, 0.0), self.total_length)
        lo, hi = 0, len(self.segments) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.cum[mid] <= s:
                lo = mid
            else:
                hi = mid - 1
        return lo, s - self.cum[lo]

    def point_at(self, s: float) -> tuple[float, float]:
        i, t = self._locate(s)
        return self.segments[i].point_at(t)

    def heading_at(self, s: float) -> float:
        i, t = self._locate(s)
        return self.segments[i].heading_at(t)

    def curvature_at(self, s: float) -> float:
        i, t = self._locate(s)
        return self.segments[i].curvature_at(t)

    def pose_at(self, s: float) -> Pose2:
        i, t = self._locate(s)
        x, y = self.segments[i].point_at(t)
        return Pose2(x, y, self.segments[i].heading_at(t))

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Exact projection: (arc length s, distance) of the closest point."""
        best_s, best_d = 0.0, math.inf
        for i, seg in enumerate(self.segments):
            t, d = seg.project(x, y)
            if d < best_d:
                best_d = d
                best_s = self.cum[i] + t
        if self.closed and best_s >= self.total_length:
            best_s -= self.total_length
        return best_s, best_d

    def intersection_spans(self) -> list:
        """(s_start, s_end, branch) for every intersection segment."""
        spans = []
        for i, info in enumerate(self.infos):
            if info.kind in ("ix4", "ix3"):
                spans.append((self.cum[i], self.cum[i + 1], info.branch or 0))
        return spans


def _edge_point(cx: float, cy: float, half: float, edge: str,
                travel: str, offset: float) -> tuple[float, float]:
    """Lane point on a cell edge for a given direction of travel.

    offset is the rightward lane offset (+2 right lane, -2 left lane).
    """
    ex, ey = cx + _DIR_VEC[edge][0] * half, cy + _DIR_VEC[edge][1] * half
    tx, ty = _DIR_VEC[travel]
    rx, ry = ty, -tx  # rightward of travel
    return ex + rx * offset, ey + ry * offset


def _cell_primitive(m: GridMap, row: int, col: int, entry: str, exit_: str,
                    offset: float):
    """Lane segment through a cell from entry edge to exit edge."""
    half = m.cell_size / 2.0
    cx, cy = m.cell_center(row, col)
    travel_in = OPPOSITE[entry]
    travel_out = exit_
    p_in = _edge_point(cx, cy, half, entry, travel_in, offset)
    p_out = _edge_point(cx, cy, half, exit_, travel_out, offset)
    if travel_in == travel_out:
        return LineSeg(p_in[0], p_in[1], p_out[0], p_out[1])
    # quarter arc about the corner shared by the entry and exit edges
    corner_x = cx + (_DIR_VEC[entry][0] + _DIR_VEC[exit_][0]) * half
    corner_y = cy + (_DIR_VEC[entry][1] + _DIR_VEC[exit_][1]) * half
    r_in = math.hypot(p_in[0] - corner_x, p_in[1] - corner_y)
    r_out = math.hypot(p_out[0] - corner_x, p_out[1] - corner_y)
    if abs(r_in - r_out) > 1e-9:
        raise MapError("inconsistent turn geometry", row, col)
    a0 = math.atan2(p_in[1] - corner_y, p_in[0] - corner_x)
    a1 = math.atan2(p_out[1] - corner_y, p_out[0] - corner_x)
    sweep = normalize_angle(a1 - a0)
    if abs(abs(sweep) - math.pi / 2.0) > 1e-9:
        raise MapError("turn is not a quarter arc", row, col)
    return ArcSeg(corner_x, corner_y, r_in, a0, sweep)


def _branch_of(entry: str, exit_: str) -> int:
    travel = OPPOSITE[entry]
    if exit_ == travel:
        return 0
    return -1 if exit_ == _LEFT_OF[travel] else 1


def _pick_exit(cell, entry: str, goal: int | None) -> str:
    conns = cell.connectors()
    choices = [d for d in DIRS if d in conns and d != entry]
    if len(choices) == 1:
        return choices[0]
    travel = OPPOSITE[entry]
    order_by_goal = {
        -1: (_LEFT_OF[travel], travel, _RIGHT_OF[travel]),
        0: (travel, _RIGHT_OF[travel], _LEFT_OF[travel]),
        1: (_RIGHT_OF[travel], travel, _LEFT_OF[travel]),
    }
    for d in order_by_goal[goal if goal is not None else 0]:
        if d in choices:
            return d
    raise MapError("no exit from intersection")  # unreachable on valid maps


class PathNetwork:
    """Lane-centerline network for one map: ideal (right-lane) and left-lane
    chains for the default circuit, plus obstacle positions."""

    def __init__(self, grid: GridMap, right: Chain, left: Chain, obstacles: list):
        self.grid = grid
        self.lanes = {"right": right, "left": left}
        self.ideal_pathway = right
        self.left_pathway = left
        self.obstacles = obstacles  # [(row, col, axis, lane_blocking)]

    def obstacle_positions(self) -> list:
        """World (x, y, s_on_ideal) of each lane-blocking obstacle."""
        out = []
        for row, col, axis, blocking in self.obstacles:
            if not blocking:
                continue
            cx, cy = self.grid.cell_center(row, col)
            s, d = self.ideal_pathway.project(cx, cy)
            px, py = self.ideal_pathway.point_at(s)
            out.append((px, py, s))
        return out


def _walk(m: GridMap, start: tuple, goal_plan=None) -> list:
    """Follow lanes from a start state until the state repeats.

    Returns [(row, col, entry, exit)]. goal_plan is an optional sequence of
    goal values consumed one per intersection (left -1 / straight 0 / right 1).
    """
    state = start
    seen = {}
    steps = []
    plan_i = 0
    limit = 8 * m.width * m.height + 16
    while state not in seen and len(steps) <= limit:
        seen[state] = len(steps)
        row, col, entry = state
        cell = m.cell(row, col)
        goal = None
        if cell.is_intersection and goal_plan is not None and plan_i < len(goal_plan):
            goal = goal_plan[plan_i]
            plan_i += 1
        exit_ = _pick_exit(cell, entry, goal)
        steps.append((row, col, entry, exit_))
        nr, nc = m.neighbor(row, col, exit_)
        state = (nr, nc, OPPOSITE[exit_])
    if state != start:
        # trim lead-in so the kept portion is the pure cycle
        steps = steps[seen[state]:]
    return steps


def _chain_from_steps(m: GridMap, steps: list, offset: float) -> Chain:
    segs, infos = [], []
    for row, col, entry, exit_ in steps:
        cell = m.cell(row, col)
        segs.append(_cell_primitive(m, row, col, entry, exit_, offset))
        branch = _branch_of(entry, exit_) if cell.is_intersection else None
        infos.append(SegmentInfo(row, col, cell.kind, branch))
    first = segs[0].point_at(0.0)
    last = segs[-1].point_at(segs[-1].length)
    closed = math.hypot(first[0] - last[0], first[1] - last[1]) < 1e-6
    return Chain(segs, infos, closed)


def _signed_area(points: list) -> float:
    a = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def extract_path_network(m: GridMap, goal_plan=None) -> PathNetwork:
    """Derive the lane network and default circuit from a validated map.

    Pure function of (map, goal_plan). The circuit is traversed CCW (positive
    enclosed area) when no goal plan forces branches.
    """
    m.validate()
    start_cell = min((rc for rc in m.road_cells()
                      if not m.cell(*rc).is_intersection),
                     default=None)
    if start_cell is None:
        raise MapError("map has no non-intersection road cell to anchor a circuit")
    row, col = start_cell
    conns = sorted(m.cell(row, col).connectors())
    steps = _walk(m, (row, col, conns[0]), goal_plan)
    if goal_plan is None:
        centers = [m.cell_center(r, c) for r, c, _, _ in steps]
        if len(set(centers)) >= 3 and _signed_area(centers) < 0:
            steps = _walk(m, (row, col, conns[1]), None)
    right = _chain_from_steps(m, steps, +LANE_OFFSET)
    left = _chain_from_steps(m, steps, -LANE_OFFSET)
    obstacles = [(r, c, cell.axis, cell.lane_blocking)
                 for (r, c) in m.road_cells()
                 for cell in [m.cell(r, c)] if cell.kind == "obstacle"]
    return PathNetwork(m, right, left, obstacles)


def sample_path(path, stepsize_straight: float, stepsize_turn: float) -> list:
    """Tangent-aligned poses at fixed arc steps along a path.

    Sampling is half-open per segment: local s = 0, step, ... < segment
    length. Returns [(Pose2, global arc length)].
    """
    if stepsize_straight <= 0 or stepsize_turn <= 0:
        raise ValueError("stepsizes must be > 0")
    chain = path.base if isinstance(path, OffsetPath) else path
    out = []
    for i, seg in enumerate(chain.segments):
        step = stepsize_straight if isinstance(seg, LineSeg) else stepsize_turn
        s0 = chain.cum[i]
        t = 0.0
        k = 0
        while t < seg.length - 1e-12:
            s = s0 + t
            out.append((path.pose_at(s), s))
            k += 1
            t = k * step
    return out


@dataclass(frozen=True)
class ObstacleReroute:
    """Reroute window around one lane-blocking obstacle at arc position s."""

    s: float
    shift_start: float = 0.0
    shift_end: float = 0.0
    transition_length: float = 6.0
    window: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "shift_start", self.s - self.window)
        object.__setattr__(self, "shift_end", self.s + self.window)


def _smoothstep(t: float) -> float:
    t = min(max(t, 0.0), 1.0)
    return t * t * (3.0 - 2.0 * t)


LANE_SHIFT = 2.0 * LANE_OFFSET  # full left-lane displacement (4 m)


class OffsetPath:
    """A chain with a smooth leftward lateral offset profile (obstacle
    reroutes). Parameterized by the base chain's arc length."""

    def __init__(self, base: Chain, reroutes: list):
        self.base = base
        self.reroutes = reroutes
        self.closed = base.closed
        self.total_length = base.total_length

    def offset_at(self, s: float) -> float:
        off = 0.0
        L = self.total_length
        for rr in self.reroutes:
            d = s - rr.s
            if self.closed:
                d = (d + L / 2.0) % L - L / 2.0
            a = abs(d)
            if a >= rr.window:
                continue
            flat = rr.window - rr.transition_length
            if a <= flat:
                off = max(off, LANE_SHIFT)
            else:
                off = max(off, LANE_SHIFT * _smoothstep((rr.window - a) / rr.transition_length))
        return off

    def _offset_slope(self, s: float) -> float:
        h = 1e-5
        return (self.offset_at(s + h) - self.offset_at(s - h)) / (2.0 * h)

    def point_at(self, s: float) -> tuple[float, float]:
        x, y = self.base.point_at(s)
        off = self.offset_at(s)
        if off == 0.0:
            return x, y
        h = self.base.heading_at(s)
        return x - off * math.sin(h), y + off * math.cos(h)

    def pose_at(self, s: float) -> Pose2:
        x, y = self.point_at(s)
        off = self.offset_at(s)
        h = self.base.heading_at(s)
        if off == 0.0:
            return Pose2(x, y, h)
        kappa = self.base.curvature_at(s)
        dpar = 1.0 - off * kappa          # tangential speed factor
        dperp = self._offset_slope(s)     # leftward rate
        return Pose2(x, y, h + math.atan2(dperp, dpar))

    def heading_at(self, s: float) -> float:
        return self.pose_at(s).heading

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Numeric projection: seeded from the base chain, refined locally."""
        s0, _ = self.base.project(x, y)
        span = 15.0

        def dist(s):
            px, py = self.point_at(s)
            return math.hypot(x - px, y - py)

        n = 61
        best_s, best_d = s0, dist(s0)
        for i in range(n):
            s = s0 - span + (2.0 * span) * i / (n - 1)
            d = dist(s)
            if d < best_d:
                best_s, best_d = s, d
        # golden-section refinement around the coarse minimum
        lo, hi = best_s - span / (n - 1) * 2, best_s + span / (n - 1) * 2
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - phi * (b - a)
        d_ = a + phi * (b - a)
        fc, fd = dist(c), dist(d_)
        for _ in range(60):
            if fc < fd:
                b, d_, fd = d_, c, fc
                c = b - phi * (b - a)
                fc = dist(c)
            else:
                a, c, fc = c, d_, fd
                d_ = a + phi * (b - a)
                fd = dist(d_)
        s = (a + b) / 2.0
        if self.closed:
            s %= self.total_length
        return s, dist(s)


def apply_obstacle_reroutes(network: PathNetwork):
    """Ideal pathway shifted smoothly onto the left lane around obstacles.

    With no lane-blocking obstacles the original chain object is returned
    unchanged. Overlapping windows merge (pointwise max of offsets).
    """
    positions = network.obstacle_positions()
    if not positions:
        return network.ideal_pathway
    reroutes = [ObstacleReroute(s=s) for _, _, s in positions]
    return OffsetPath(network.ideal_pathway, reroutes)
