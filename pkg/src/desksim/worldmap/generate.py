"""Random road-network generation: a closed rectangular circuit with random
chord roads (T- and 4-way intersections), obstacles on long straights, and
style-dependent decoration.

Chords rather than notched corners keep every circuit turn on the outer
6 m lane radius, which the waypoint steering law can track inside the 1 m
critical region; inner 2 m turns remain available to hand-built maps.
"""

from __future__ import annotations

from ..core import SeededRng
from .grid import Cell, GridMap, MapError

_TURNS = {("S", "E"): "SE", ("E", "S"): "SE", ("S", "W"): "SW", ("W", "S"): "SW",
          ("N", "E"): "NE", ("E", "N"): "NE", ("N", "W"): "NW", ("W", "N"): "NW"}


def _ring_cells(r0: int, c0: int, r1: int, c1: int) -> list:
    """CCW cell cycle around the rectangle ring with corners (r0,c0)/(r1,c1)."""
    cycle = [(r0, c) for c in range(c0, c1 + 1)]
    cycle += [(r, c1) for r in range(r0 + 1, r1 + 1)]
    cycle += [(r1, c) for c in range(c1 - 1, c0 - 1, -1)]
    cycle += [(r, c0) for r in range(r1 - 1, r0, -1)]
    return cycle


def _lay_ring(m: GridMap, r0: int, c0: int, r1: int, c1: int) -> None:
    for r, c in _ring_cells(r0, c0, r1, c1):
        if (r, c) == (r0, c0):
            m.set_cell(r, c, Cell("turn", corner="NE"))
        elif (r, c) == (r0, c1):
            m.set_cell(r, c, Cell("turn", corner="NW"))
        elif (r, c) == (r1, c1):
            m.set_cell(r, c, Cell("turn", corner="SW"))
        elif (r, c) == (r1, c0):
            m.set_cell(r, c, Cell("turn", corner="SE"))
        elif r in (r0, r1):
            m.set_cell(r, c, Cell("straight", axis="EW"))
        else:
            m.set_cell(r, c, Cell("straight", axis="NS"))


def _add_chords(m: GridMap, r0, c0, r1, c1, rng: SeededRng) -> None:
    """Interior chord roads joining opposite ring edges; crossings become
    4-way intersections, endpoints become T-intersections."""
    v_candidates = list(range(c0 + 2, c1 - 1))
    h_candidates = list(range(r0 + 2, r1 - 1))
    max_chords = max(0, (c1 - c0 + r1 - r0) // 6)
    v_cols: list = []
    h_rows: list = []
    for _ in range(max_chords):
        vertical = rng.integers(0, 2) == 0
        pool, taken = ((v_candidates, v_cols) if vertical
                       else (h_candidates, h_rows))
        options = [x for x in pool if all(abs(x - t) >= 2 for t in taken)]
        if not options:
            continue
        taken.append(options[rng.integers(0, len(options))])
    for c in v_cols:
        m.set_cell(r0, c, Cell("ix3", open_side="S"))
        m.set_cell(r1, c, Cell("ix3", open_side="N"))
        for r in range(r0 + 1, r1):
            m.set_cell(r, c, Cell("straight", axis="NS"))
    for r in h_rows:
        m.set_cell(r, c0, Cell("ix3", open_side="W"))
        m.set_cell(r, c1, Cell("ix3", open_side="E"))
        for c in range(c0 + 1, c1):
            if m.cell(r, c).kind == "straight" and m.cell(r, c).axis == "NS":
                m.set_cell(r, c, Cell("ix4"))
            else:
                m.set_cell(r, c, Cell("straight", axis="EW"))


def _place_obstacles(m: GridMap, cycle: list, density: float, rng: SeededRng) -> None:
    """Turn eligible circuit straights into lane-blocking obstacles.

    A cell is eligible when the two circuit cells on each side are straights
    on the same axis, so the +-10 m reroute window stays on a straight run.
    """
    if density <= 0.0:
        return
    n = len(cycle)
    taken: list = []
    for i in range(n):
        window = [m.cell(*cycle[(i + k) % n]) for k in range(-2, 3)]
        if not all(c.kind == "straight" and c.axis == window[2].axis for c in window):
            continue
        if any(abs((i - j + n // 2) % n - n // 2) < 4 for j in taken):
            continue  # keep reroute windows from stacking in generation
        if rng.uniform() < density:
            r, c = cycle[i]
            m.set_cell(r, c, Cell("obstacle", axis=window[2].axis, lane_blocking=True))
            taken.append(i)


def _decorate(m: GridMap, rng: SeededRng) -> None:
    tree_p, house_p = (0.10, 0.04) if m.environment_style == "desert" else (0.06, 0.22)
    for r in range(m.height):
        for c in range(m.width):
            if m.cells[r][c].kind != "empty":
                continue
            u = rng.uniform()
            if u < house_p:
                m.set_cell(r, c, Cell("house", variant=rng.integers(0, 4)))
            elif u < house_p + tree_p:
                m.set_cell(r, c, Cell("tree"))


def generate_random_map(seed: int, width: int, height: int,
                        style: str = "desert",
                        obstacle_density: float = 0.0) -> GridMap:
    """Generate a valid GridMap whose roads form one closed circuit with
    optional intersections. Deterministic in seed."""
    if width < 4 or height < 4:
        raise MapError(f"grid {width}x{height} too small for a closed circuit "
                       "(minimum 4x4)")
    if style not in ("desert", "urban"):
        raise MapError(f"unknown style {style!r}")
    rng = SeededRng(seed)
    r0 = rng.integers(0, min(3, max(1, height - 4)))
    c0 = rng.integers(0, min(3, max(1, width - 4)))
    r1 = height - 1 - rng.integers(0, min(3, max(1, height - 3 - r0)))
    c1 = width - 1 - rng.integers(0, min(3, max(1, width - 3 - c0)))
    r1 = max(r1, r0 + 3)
    c1 = max(c1, c0 + 3)
    m = GridMap(width, height, environment_style=style, seed=int(seed))
    _lay_ring(m, r0, c0, r1, c1)
    if min(r1 - r0, c1 - c0) >= 4:
        _add_chords(m, r0, c0, r1, c1, rng.spawn(3))
    _place_obstacles(m, _ring_cells(r0, c0, r1, c1), obstacle_density, rng.spawn(1))
    _decorate(m, rng.spawn(2))
    m.validate()
    return m
