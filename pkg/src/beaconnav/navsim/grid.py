"""Occupancy grid and its text file format.

Map files look like::

    resolution 0.05
    origin 0.0 0.0
    ########
    #......#
    ########

Rows of ``#`` (occupied) and ``.`` (free); the first grid row is the top of
the map (maximum y).  ``origin`` is the world position of the lower-left
corner of cell (0, 0); cell (i, j) spans
[origin + i*res, origin + (i+1)*res) in x and likewise in y with j counted
upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, InvalidArgumentError


@dataclass
class OccupancyGrid:
    resolution: float
    origin_x: float
    origin_y: float
    cells: np.ndarray  # bool, shape (height, width), row 0 = minimum y

    def __post_init__(self):
        if self.resolution <= 0:
            raise InvalidArgumentError("resolution must be positive")
        self.cells = np.asarray(self.cells, dtype=bool)
        if self.cells.ndim != 2 or self.cells.shape[0] < 1 or self.cells.shape[1] < 1:
            raise InvalidArgumentError("grid must be at least 1x1")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height

    def occupied(self, i: int, j: int) -> bool:
        return bool(self.cells[j, i])

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        return (
            int(math.floor((x - self.origin_x) / self.resolution)),
            int(math.floor((y - self.origin_y) / self.resolution)),
        )

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.origin_x + (i + 0.5) * self.resolution,
            self.origin_y + (j + 0.5) * self.resolution,
        )

    def to_rows(self) -> list[str]:
        """Grid as text rows, top row first."""
        return [
            "".join("#" if c else "." for c in self.cells[j])
            for j in range(self.height - 1, -1, -1)
        ]


def parse_map_text(text: str) -> OccupancyGrid:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3:
        raise ConfigError("map file needs resolution, origin and at least one row")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "resolution":
        raise ConfigError("map file must start with 'resolution <meters>'")
    orig = lines[1].split()
    if len(orig) != 3 or orig[0] != "origin":
        raise ConfigError("map file second line must be 'origin <x> <y>'")
    try:
        resolution = float(head[1])
        ox, oy = float(orig[1]), float(orig[2])
    except ValueError as e:
        raise ConfigError(f"bad number in map header: {e}") from e
    rows = lines[2:]
    width = len(rows[0])
    grid = np.zeros((len(rows), width), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ConfigError(f"map row {r + 3} has width {len(row)}, expected {width}")
        for c, ch in enumerate(row):
            if ch == "#":
                grid[len(rows) - 1 - r, c] = True  # top text row = max y
            elif ch != ".":
                raise ConfigError(f"map row {r + 3}: unexpected character {ch!r}")
    return OccupancyGrid(resolution, ox, oy, grid)


def load_map(path: str | Path) -> OccupancyGrid:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"map file not found: {p}")
    return parse_map_text(p.read_text(encoding="utf-8"))


def inflate(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """Grow obstacles so any free cell whose center lies within ``radius``
    of an occupied cell's square becomes occupied."""
    if radius < 0:
        raise InvalidArgumentError("inflation radius must be >= 0")
    r_cells = radius / grid.resolution
    reach = int(math.ceil(r_cells + 0.5))
    out = grid.cells.copy()
    h, w = grid.cells.shape
    for dj in range(-reach, reach + 1):
        for di in range(-reach, reach + 1):
            # Distance from a cell center to the nearest point of a square
            # occupied cell offset by (di, dj), in cell units.
            d = math.hypot(max(0.0, abs(di) - 0.5), max(0.0, abs(dj) - 0.5))
            if d > r_cells:
                continue
            src_j = slice(max(0, -dj), min(h, h - dj))
            src_i = slice(max(0, -di), min(w, w - di))
            dst_j = slice(max(0, dj), min(h, h + dj))
            dst_i = slice(max(0, di), min(w, w + di))
            out[dst_j, dst_i] |= grid.cells[src_j, src_i]
    return OccupancyGrid(grid.resolution, grid.origin_x, grid.origin_y, out)
