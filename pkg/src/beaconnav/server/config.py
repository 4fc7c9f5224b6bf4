"""Server configuration and validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..beacons import Footprint
from ..errors import ConfigError
from ..evalkit.events import System
from ..geometry import Frame, Pose, Vec3, quat_from_yaw
from ..navsim.robot import NavParams


@dataclass
class ServerConfig:
    map_path: Path
    db_path: Path
    stages_path: Optional[Path] = None
    host: str = "127.0.0.1"
    http_port: int = 8080
    bridge_port: int = 10000
    tick_hz: float = 20.0
    anchor_xyyaw: tuple[float, float, float] = (0.0, 0.0, 0.0)
    footprint: Footprint = field(default_factory=Footprint)
    robot_start: tuple[float, float, float] = (0.0, 0.0, 0.0)
    nav: NavParams = field(default_factory=NavParams)
    experiment: bool = False
    participant: Optional[str] = None
    system: Optional[System] = None
    event_log_path: Optional[Path] = None
    strict_stage_containment: bool = False
    external_robot: bool = False

    def validate(self) -> None:
        if not (5.0 <= self.tick_hz <= 100.0):
            raise ConfigError(f"tick rate must be 5..100 Hz, got {self.tick_hz}")
        if self.http_port == self.bridge_port and self.http_port != 0:
            raise ConfigError("http port and bridge port must differ")
        for v in (*self.anchor_xyyaw, *self.robot_start):
            if not math.isfinite(v):
                raise ConfigError("anchor and robot start must be finite")
        if self.experiment:
            if not self.participant or self.system is None:
                raise ConfigError("experiment mode needs --participant and --system")
            if self.stages_path is None:
                raise ConfigError("experiment mode needs a stage file")
            if self.external_robot:
                raise ConfigError(
                    "experiment mode needs the in-process simulator; "
                    "an external robot reports no navigation outcomes"
                )

    @property
    def anchor(self) -> Pose:
        x, y, yaw = self.anchor_xyyaw
        if (x, y, yaw) == (0.0, 0.0, 0.0):
            return Pose.identity()
        return Pose(Vec3(x, y, 0.0), quat_from_yaw(yaw), Frame.ROBOT_MAP)

    def default_event_log_path(self) -> Path:
        if self.event_log_path is not None:
            return self.event_log_path
        system = self.system.value if self.system else "na"
        return Path(f"events_{self.participant or 'na'}_{system}.ndjson")
