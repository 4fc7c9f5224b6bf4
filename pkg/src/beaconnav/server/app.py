"""Composition root: loads the world, restores the beacon database, and runs
the simulator tick loop, the robot TCP endpoint and the operator HTTP API."""

from __future__ import annotations

import logging
import threading
from typing import Optional

from ..beacons import Session
from ..bridge import BridgeEndpoint
from ..errors import ConfigError
from ..geometry import Frame, Pose, Vec3, quat_from_yaw
from ..navsim.grid import load_map
from ..navsim.robot import NavGoal, NavState, NavStatus, RobotSim, RobotState
from ..navsim.stages import check_stage, load_stages
from ..store import Database
from .config import ServerConfig
from .core import AppCore, EventHub
from .experiment import ExperimentRun
from .http_api import ApiServer
from .sim_runner import SimRunner

log = logging.getLogger(__name__)


class Server:
    """Everything `serve` runs; also usable in-process (tests, tools)."""

    def __init__(self, config: ServerConfig):
        config.validate()
        self.config = config
        self.grid = load_map(config.map_path)
        self.stages = load_stages(config.stages_path) if config.stages_path else []
        self.db = Database.load(config.db_path)

        session = Session(anchor=config.anchor, footprint=config.footprint)
        AppCore.instantiate_stored_beacons(session, self.db)

        x, y, yaw = config.robot_start
        start_cell = self.grid.world_to_cell(x, y)
        if not self.grid.in_bounds(*start_cell) or self.grid.occupied(*start_cell):
            raise ConfigError(f"robot start ({x}, {y}) is outside free map space")
        self.sim = RobotSim(self.grid, RobotState(x, y, yaw), config.nav)

        experiment: Optional[ExperimentRun] = None
        if config.experiment:
            experiment = ExperimentRun(
                config.default_event_log_path(),
                config.participant,
                config.system,
                self.stages,
                config.footprint,
            )
        self.experiment = experiment

        self.core = AppCore(
            grid=self.grid,
            stages=self.stages,
            db=self.db,
            session=session,
            dispatch_goal=self._dispatch_goal,
            hub=EventHub(),
            experiment=experiment,
        )
        self.core.robot_state = RobotState(x, y, yaw)

        self.sim_runner = SimRunner(
            self.sim, config.tick_hz, self._on_tick, self.core.on_robot_status
        )
        self.bridge = BridgeEndpoint(
            config.host,
            config.bridge_port,
            on_pose=self.core.on_external_pose if config.external_robot else None,
            on_log=lambda text: log.info("robot log: %s", text),
        )
        try:
            self.httpd = ApiServer((config.host, config.http_port), self.core)
        except OSError as e:
            raise ConfigError(f"cannot bind http port {config.http_port}: {e}") from e
        self._http_thread: Optional[threading.Thread] = None
        self._stage_entered = False

    def _dispatch_goal(self, goal: NavGoal) -> NavStatus:
        if self.config.external_robot:
            pose = Pose(Vec3(goal.x, goal.y, 0.0), quat_from_yaw(goal.yaw), Frame.ROBOT_MAP)
            self.bridge.send_goal(pose)
            # the external robot reports poses but no outcome; stay optimistic
            return NavStatus(NavState.FOLLOWING)
        self._stage_entered = False
        return self.sim_runner.set_goal(goal)

    def _on_tick(self, state: RobotState, t: float) -> None:
        self.core.on_robot_tick(state, t)
        if (
            self.experiment is not None
            and self.config.strict_stage_containment
            and self.core.nav_status.state in (NavState.FOLLOWING, NavState.ROTATING_TO_GOAL)
        ):
            stage = self.experiment.current_stage
            if stage is None:
                return
            chk = check_stage(stage, state, self.config.footprint)
            if chk.inside:
                self._stage_entered = True
            elif self._stage_entered:
                self._stage_entered = False
                self.sim_runner.cancel()
                self.core.on_strict_zone_exit(state)

    @property
    def http_port(self) -> int:
        return self.httpd.server_address[1]

    @property
    def bridge_port(self) -> Optional[int]:
        return self.bridge.port

    def start(self) -> None:
        self.bridge.start()
        self.sim_runner.start()
        self._http_thread = threading.Thread(
            target=self.httpd.serve_forever, kwargs={"poll_interval": 0.1},
            name="http", daemon=True,
        )
        self._http_thread.start()
        log.info(
            "serving: http=%s:%d bridge=%s:%d map=%s beacons=%d",
            self.config.host, self.http_port, self.config.host, self.bridge.port,
            self.config.map_path, len(self.db),
        )

    def stop(self) -> None:
        self.httpd.stopping.set()
        self.httpd.shutdown()
        self.httpd.server_close()
        self.sim_runner.stop()
        self.bridge.stop()
        # committed state is already durable; a final save is a no-op guard
        self.db.save()
        if self.experiment is not None:
            self.experiment.close()

    def run_forever(self, stop_event: threading.Event) -> None:
        self.start()
        stop_event.wait()
        self.stop()
