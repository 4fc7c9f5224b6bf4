"""Differential-drive robot simulator: plan, follow, rotate to goal yaw.

The follower rotates toward the current waypoint and only drives while the
heading error is under the drive gate; waypoints are consumed inside 0.10 m,
the final approach targets the exact goal point, and success requires both
the position and yaw tolerances.  Kinematics are the unicycle model with
explicit Euler integration, so a given grid, goal and dt sequence always
produces a bit-identical trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..errors import InvalidArgumentError
from ..geometry import wrap_angle
from .grid import OccupancyGrid, inflate
from .planner import a_star_cells


@dataclass
class RobotState:
    x: float
    y: float
    yaw: float
    v: float = 0.0
    w: float = 0.0


@dataclass(frozen=True)
class NavGoal:
    x: float
    y: float
    yaw: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.yaw)):
            raise InvalidArgumentError("navigation goal must be finite")


class NavState(Enum):
    IDLE = "idle"
    FOLLOWING = "following"
    ROTATING_TO_GOAL = "rotating_to_goal"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


@dataclass(frozen=True)
class NavStatus:
    state: NavState
    reason: Optional[str] = None  # "no-path" or "timeout" when FAILED

    @property
    def terminal(self) -> bool:
        return self.state in (NavState.SUCCEEDED, NavState.FAILED)


@dataclass(frozen=True)
class NavParams:
    v_max: float = 0.5
    w_max: float = 1.5
    k_v: float = 1.5
    k_w: float = 3.0
    waypoint_tol: float = 0.10
    pos_tol: float = 0.05
    yaw_tol: float = math.radians(5.0)
    drive_gate: float = math.radians(30.0)
    goal_timeout: float = 120.0
    inflation_radius: float = 0.12


def _clamp(v: float, lim: float) -> float:
    return max(-lim, min(lim, v))


def _corner_cells(cells: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Drop cells along straight runs; chords between the kept corner cells
    lie exactly on the planned line, so the compressed path stays clear."""
    if len(cells) <= 2:
        return cells
    out = [cells[0]]
    for k in range(1, len(cells) - 1):
        d_in = (cells[k][0] - cells[k - 1][0], cells[k][1] - cells[k - 1][1])
        d_out = (cells[k + 1][0] - cells[k][0], cells[k + 1][1] - cells[k][1])
        if d_in != d_out:
            out.append(cells[k])
    out.append(cells[-1])
    return out


class RobotSim:
    """Simulated robot on an occupancy grid, advanced by fixed-dt ticks."""

    def __init__(self, grid: OccupancyGrid, start: RobotState, params: NavParams = NavParams()):
        self.grid = grid
        self.planning_grid = inflate(grid, params.inflation_radius)
        self.state = start
        self.params = params
        self.status = NavStatus(NavState.IDLE)
        self._goal: Optional[NavGoal] = None
        self._waypoints: list[tuple[float, float]] = []
        self._wp_index = 0
        self._elapsed = 0.0

    def set_goal(self, goal: NavGoal) -> NavStatus:
        """Plan toward a new goal; a newer goal supersedes the active one."""
        self._goal = goal
        self._elapsed = 0.0
        pgrid = self.planning_grid
        # The robot may legally stand inside the inflation band; planning
        # from its own cell must not fail because of it.
        start_cell = pgrid.world_to_cell(self.state.x, self.state.y)
        if pgrid.in_bounds(*start_cell) and pgrid.occupied(*start_cell) and not self.grid.occupied(*start_cell):
            pgrid = OccupancyGrid(pgrid.resolution, pgrid.origin_x, pgrid.origin_y, pgrid.cells.copy())
            pgrid.cells[start_cell[1], start_cell[0]] = False
        res = a_star_cells(pgrid, start_cell, pgrid.world_to_cell(goal.x, goal.y))
        if res is None:
            self._waypoints = []
            self.status = NavStatus(NavState.FAILED, "no-path")
            return self.status
        path = [pgrid.cell_center(i, j) for i, j in _corner_cells(res[0])]
        if math.hypot(path[-1][0] - goal.x, path[-1][1] - goal.y) > 1e-9:
            path.append((goal.x, goal.y))  # exact final approach
        self._waypoints = path
        self._wp_index = 0
        self.status = NavStatus(NavState.FOLLOWING)
        return self.status

    def cancel(self) -> None:
        """Drop the active goal and stop in place."""
        self._goal = None
        self._waypoints = []
        self.state.v = 0.0
        self.state.w = 0.0
        self.status = NavStatus(NavState.IDLE)

    def tick(self, dt: float) -> NavStatus:
        """Advance the simulation by dt seconds."""
        if dt <= 0:
            raise InvalidArgumentError("dt must be positive")
        if self._goal is None or self.status.terminal or self.status.state is NavState.IDLE:
            self.state.v = 0.0
            self.state.w = 0.0
            return self.status

        self._elapsed += dt
        if self._elapsed > self.params.goal_timeout:
            self.state.v = 0.0
            self.state.w = 0.0
            self.status = NavStatus(NavState.FAILED, "timeout")
            return self.status

        p = self.params
        s = self.state
        goal = self._goal

        # Consume every waypoint already inside its arrival tolerance; the
        # final waypoint (the exact goal point) uses a tighter radius so the
        # position tolerance is reachable afterwards.
        while self._wp_index < len(self._waypoints):
            tx, ty = self._waypoints[self._wp_index]
            d = math.hypot(tx - s.x, ty - s.y)
            last = self._wp_index == len(self._waypoints) - 1
            tol = 0.5 * p.pos_tol if last else p.waypoint_tol
            if d < tol:
                self._wp_index += 1
            else:
                break

        if self._wp_index < len(self._waypoints):
            self.status = NavStatus(NavState.FOLLOWING)
            tx, ty = self._waypoints[self._wp_index]
            d = math.hypot(tx - s.x, ty - s.y)
            heading_err = wrap_angle(math.atan2(ty - s.y, tx - s.x) - s.yaw)
            w = _clamp(p.k_w * heading_err, p.w_max)
            v = _clamp(p.k_v * d, p.v_max) if abs(heading_err) < p.drive_gate else 0.0
        else:
            yaw_err = wrap_angle(goal.yaw - s.yaw)
            pos_err = math.hypot(goal.x - s.x, goal.y - s.y)
            if pos_err < p.pos_tol and abs(yaw_err) < p.yaw_tol:
                s.v = 0.0
                s.w = 0.0
                self.status = NavStatus(NavState.SUCCEEDED)
                return self.status
            self.status = NavStatus(NavState.ROTATING_TO_GOAL)
            v = 0.0
            w = _clamp(p.k_w * yaw_err, p.w_max)

        s.v = v
        s.w = w
        s.x += v * math.cos(s.yaw) * dt
        s.y += v * math.sin(s.yaw) * dt
        s.yaw = wrap_angle(s.yaw + w * dt)
        return self.status
