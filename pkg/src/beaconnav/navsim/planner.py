"""8-connected A* over an occupancy grid with the octile-distance heuristic.

Diagonal steps are only allowed when both adjacent orthogonal cells are
free, so paths never cut corners.  Ties in the open heap are broken by heap
insertion order, which makes planning fully deterministic.
"""

from __future__ import annotations

import heapq
import math

from .grid import OccupancyGrid

SQRT2 = math.sqrt(2.0)

# (di, dj, step cost in cells); fixed order for determinism
_NEIGHBORS = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT2),
    (1, -1, SQRT2),
    (-1, 1, SQRT2),
    (-1, -1, SQRT2),
]


def octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy)


def neighbors(grid: OccupancyGrid, cell: tuple[int, int]):
    i, j = cell
    for di, dj, cost in _NEIGHBORS:
        ni, nj = i + di, j + dj
        if not grid.in_bounds(ni, nj) or grid.occupied(ni, nj):
            continue
        if di != 0 and dj != 0:
            # no corner cutting: both orthogonal cells must be free
            if grid.occupied(i + di, j) or grid.occupied(i, j + dj):
                continue
        yield (ni, nj), cost


def a_star_cells(
    grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]
) -> tuple[list[tuple[int, int]], float] | None:
    """Shortest cell path and its cost in cell units, or None if unreachable."""
    if not grid.in_bounds(*start) or not grid.in_bounds(*goal):
        return None
    if grid.occupied(*start) or grid.occupied(*goal):
        return None
    g: dict[tuple[int, int], float] = {start: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    seq = 0
    heap: list[tuple[float, int, tuple[int, int]]] = [(octile(start, goal), seq, start)]
    closed: set[tuple[int, int]] = set()
    while heap:
        _, _, cur = heapq.heappop(heap)
        if cur in closed:
            continue
        if cur == goal:
            path = [cur]
            while cur in parent:
                cur = parent[cur]
                path.append(cur)
            path.reverse()
            return path, g[goal]
        closed.add(cur)
        for nxt, cost in neighbors(grid, cur):
            cand = g[cur] + cost
            if cand < g.get(nxt, math.inf):
                g[nxt] = cand
                parent[nxt] = cur
                seq += 1
                heapq.heappush(heap, (cand + octile(nxt, goal), seq, nxt))
    return None


def plan(
    grid: OccupancyGrid, start: tuple[float, float], goal: tuple[float, float]
) -> list[tuple[float, float]] | None:
    """World-coordinate path of cell centers from start to goal, or None."""
    start_cell = grid.world_to_cell(*start)
    goal_cell = grid.world_to_cell(*goal)
    res = a_star_cells(grid, start_cell, goal_cell)
    if res is None:
        return None
    cells, _ = res
    return [grid.cell_center(i, j) for i, j in cells]
