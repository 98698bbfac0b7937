"""Block-grid world model: cells, validation, and the JSON map file format.

Grid indexing: cells[row][col], row 0 at the south edge, col 0 at the west
edge. A cell's world-space center is ((col + 0.5) * cell_size,
(row + 0.5) * cell_size). See docs/map_format.md for the file schema.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

MAP_FORMAT_VERSION = 1

N, E, S, W = "N", "E", "S", "W"
DIRS = (N, E, S, W)
OPPOSITE = {N: S, S: N, E: W, W: E}
# (drow, dcol) per direction; rows grow northward.
DIR_STEP = {N: (1, 0), S: (-1, 0), E: (0, 1), W: (0, -1)}

HOUSE_VARIANTS = (0, 1, 2, 3)  # registered palette; heights in render.scene
STYLES = ("desert", "urban")


class MapError(ValueError):
    """Raised for invalid map structure, cells, or file contents."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        if row is not None:
            message = f"{message} (row {row}, col {col})"
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class Cell:
    """One grid cell.

    kind is one of: "empty", "straight", "turn", "ix4", "ix3", "house",
    "tree", "obstacle". Parameters:
      straight/obstacle: axis "NS" | "EW"; obstacle also lane_blocking
      turn: corner "NE" | "NW" | "SE" | "SW" (the two connected edges)
      ix3: open side (the one edge WITHOUT a road connection)
      house: variant id from HOUSE_VARIANTS
    """

    kind: str = "empty"
    axis: str | None = None
    corner: str | None = None
    open_side: str | None = None
    variant: int | None = None
    lane_blocking: bool = True

    @property
    def is_road(self) -> bool:
        return self.kind in ("straight", "turn", "ix4", "ix3", "obstacle")

    @property
    def is_intersection(self) -> bool:
        return self.kind in ("ix4", "ix3")

    def connectors(self) -> frozenset:
        if self.kind in ("straight", "obstacle"):
            return frozenset((N, S)) if self.axis == "NS" else frozenset((E, W))
        if self.kind == "turn":
            return frozenset(self.corner)  # e.g. "NE" -> {N, E}
        if self.kind == "ix4":
            return frozenset(DIRS)
        if self.kind == "ix3":
            return frozenset(d for d in DIRS if d != self.open_side)
        return frozenset()

    def token(self) -> str:
        if self.kind == "empty":
            return "EMPTY"
        if self.kind == "straight":
            return f"RS-{self.axis}"
        if self.kind == "turn":
            return f"RT-{self.corner}"
        if self.kind == "ix4":
            return "IX4"
        if self.kind == "ix3":
            return f"IX3-{self.open_side}"
        if self.kind == "house":
            return f"HOUSE:{self.variant}"
        if self.kind == "tree":
            return "TREE"
        if self.kind == "obstacle":
            base = f"OBST-{self.axis}"
            return base if self.lane_blocking else base + "-NB"
        raise MapError(f"unencodable cell kind {self.kind!r}")


EMPTY = Cell()


def parse_cell(token: str, row: int | None = None, col: int | None = None) -> Cell:
    t = token.strip().upper()
    if t == "EMPTY":
        return EMPTY
    if t in ("RS-NS", "RS-EW"):
        return Cell("straight", axis=t[3:])
    if t in ("RT-NE", "RT-NW", "RT-SE", "RT-SW"):
        return Cell("turn", corner=t[3:])
    if t == "IX4":
        return Cell("ix4")
    if t.startswith("IX3-") and t[4:] in DIRS:
        return Cell("ix3", open_side=t[4:])
    if t.startswith("HOUSE:"):
        try:
            variant = int(t[6:])
        except ValueError:
            raise MapError(f"bad house variant in {token!r}", row, col) from None
        if variant not in HOUSE_VARIANTS:
            raise MapError(f"house variant {variant} not in palette", row, col)
        return Cell("house", variant=variant)
    if t == "TREE":
        return Cell("tree")
    if t in ("OBST-NS", "OBST-EW"):
        return Cell("obstacle", axis=t[5:7], lane_blocking=True)
    if t in ("OBST-NS-NB", "OBST-EW-NB"):
        return Cell("obstacle", axis=t[5:7], lane_blocking=False)
    raise MapError(f"unknown cell token {token!r}", row, col)


@dataclass
class GridMap:
    width: int
    height: int
    cells: list = field(repr=False)  # cells[row][col] -> Cell
    cell_size: float = 8.0
    environment_style: str = "desert"
    seed: int = 0
    version: int = MAP_FORMAT_VERSION

    def __init__(self, width: int, height: int, cells=None, cell_size: float = 8.0,
                 environment_style: str = "desert", seed: int = 0,
                 version: int = MAP_FORMAT_VERSION):
        self.width = width
        self.height = height
        self.cells = cells if cells is not None else [
            [EMPTY for _ in range(width)] for _ in range(height)]
        self.cell_size = cell_size
        self.environment_style = environment_style
        self.seed = seed
        self.version = version

    def __eq__(self, other) -> bool:
        return isinstance(other, GridMap) and to_dict(self) == to_dict(other)

    def cell(self, row: int, col: int) -> Cell:
        if 0 <= row < self.height and 0 <= col < self.width:
            return self.cells[row][col]
        return EMPTY

    def set_cell(self, row: int, col: int, cell: Cell) -> None:
        self.cells[row][col] = cell

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)

    def road_cells(self):
        return [(r, c) for r in range(self.height) for c in range(self.width)
                if self.cells[r][c].is_road]

    def neighbor(self, row: int, col: int, d: str) -> tuple[int, int]:
        dr, dc = DIR_STEP[d]
        return row + dr, col + dc

    def validate(self) -> None:
        """Raise MapError if any structural invariant is violated."""
        if self.environment_style not in STYLES:
            raise MapError(f"unknown style {self.environment_style!r}")
        roads = self.road_cells()
        if not roads:
            raise MapError("map contains no road cells")
        for r, c in roads:
            cell = self.cells[r][c]
            for d in cell.connectors():
                nr, nc = self.neighbor(r, c, d)
                nb = self.cell(nr, nc)
                if not nb.is_road or OPPOSITE[d] not in nb.connectors():
                    raise MapError(f"dangling road connector {d}", r, c)
            if cell.kind == "obstacle" and cell.axis not in ("NS", "EW"):
                raise MapError("obstacle without axis", r, c)
        # single connected network (flood fill over connectors)
        seen = {roads[0]}
        stack = [roads[0]]
        while stack:
            r, c = stack.pop()
            for d in self.cells[r][c].connectors():
                nxt = self.neighbor(r, c, d)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != len(roads):
            r, c = next(p for p in roads if p not in seen)
            raise MapError("road network is not connected", r, c)


def to_dict(m: GridMap) -> dict:
    return {
        "version": m.version,
        "cell_size": m.cell_size,
        "width": m.width,
        "height": m.height,
        "environment_style": m.environment_style,
        "seed": m.seed,
        "cells": [[m.cells[r][c].token() for c in range(m.width)]
                  for r in range(m.height)],
    }


def from_dict(d: dict) -> GridMap:
    try:
        version = d["version"]
    except (KeyError, TypeError):
        raise MapError("map file missing 'version'") from None
    if version != MAP_FORMAT_VERSION:
        raise MapError(f"unsupported map version {version!r} "
                       f"(supported: {MAP_FORMAT_VERSION})")
    try:
        width, height = int(d["width"]), int(d["height"])
        rows = d["cells"]
        cell_size = float(d.get("cell_size", 8.0))
        style = d.get("environment_style", "desert")
        seed = int(d.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise MapError(f"malformed map file: {exc}") from None
    if len(rows) != height or any(len(row) != width for row in rows):
        raise MapError("cells array does not match width/height")
    cells = [[parse_cell(rows[r][c], r, c) for c in range(width)]
             for r in range(height)]
    m = GridMap(width, height, cells, cell_size=cell_size,
                environment_style=style, seed=seed, version=version)
    m.validate()
    return m


def map_digest(m: GridMap) -> str:
    """Stable content hash of a map, used to pair logs with their world."""
    canon = json.dumps(to_dict(m), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def save_map(m: GridMap, path) -> None:
    Path(path).write_text(json.dumps(to_dict(m), indent=1, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_map(path) -> GridMap:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MapError(f"map file is not valid JSON: {exc}") from None
    return from_dict(d)


def loads_map(text: str) -> GridMap:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapError(f"map document is not valid JSON: {exc}") from None
    return from_dict(d)
