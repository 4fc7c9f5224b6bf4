"""Experiment stage areas and the containment / heading check.

Stage files hold one line per stage::

    stage <id> <cx> <cy> <w> <h> <area_yaw> <target_yaw> <yaw_tol>

Angles in radians.  A robot is inside a stage when all four corners of its
footprint rectangle lie within the stage rectangle; the outer edge of the
area is the boundary, so touching it still counts as inside but any corner
beyond it does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..beacons import Footprint
from ..errors import ConfigError, InvalidArgumentError
from ..geometry import wrap_angle
from .robot import RobotState


@dataclass(frozen=True)
class Stage:
    id: int
    cx: float
    cy: float
    w: float
    h: float
    yaw: float  # orientation of the area rectangle
    target_yaw: float  # required robot heading
    yaw_tol: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0 or self.yaw_tol <= 0:
            raise InvalidArgumentError("stage size and yaw tolerance must be positive")


@dataclass(frozen=True)
class StageCheck:
    inside: bool
    heading_ok: bool


def footprint_corners(x: float, y: float, yaw: float, length: float, width: float):
    """World coordinates of the four corners of a pose-centered rectangle."""
    c, s = math.cos(yaw), math.sin(yaw)
    hl, hw = length / 2.0, width / 2.0
    for dx, dy in ((hl, hw), (hl, -hw), (-hl, hw), (-hl, -hw)):
        yield (x + c * dx - s * dy, y + s * dx + c * dy)


def check_stage(stage: Stage, robot: RobotState, footprint: Footprint) -> StageCheck:
    c, s = math.cos(-stage.yaw), math.sin(-stage.yaw)
    inside = True
    for px, py in footprint_corners(robot.x, robot.y, robot.yaw, footprint.length, footprint.width):
        dx, dy = px - stage.cx, py - stage.cy
        lx = c * dx - s * dy
        ly = s * dx + c * dy
        if abs(lx) > stage.w / 2.0 or abs(ly) > stage.h / 2.0:
            inside = False
            break
    heading_ok = abs(wrap_angle(robot.yaw - stage.target_yaw)) <= stage.yaw_tol
    return StageCheck(inside, heading_ok)


def parse_stages_text(text: str) -> list[Stage]:
    stages: list[Stage] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 9 or parts[0] != "stage":
            raise ConfigError(f"stage file line {lineno}: expected 'stage <id> <cx> <cy> <w> <h> <yaw> <target_yaw> <yaw_tol>'")
        try:
            stages.append(
                Stage(
                    int(parts[1]),
                    *(float(p) for p in parts[2:9]),
                )
            )
        except (ValueError, InvalidArgumentError) as e:
            raise ConfigError(f"stage file line {lineno}: {e}") from e
    return stages


def load_stages(path: str | Path) -> list[Stage]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"stage file not found: {p}")
    return parse_stages_text(p.read_text(encoding="utf-8"))
