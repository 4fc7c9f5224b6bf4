"""Application core: one lock-serialized command stream owning the session
and the store, a fan-out event hub, and the glue between beacon effects,
persistence, goal dispatch and the experiment harness."""

from __future__ import annotations

import logging
import queue
import threading
from dataclasses import replace
from typing import Callable, Optional

from ..beacons import (
    Beacon,
    BeaconCommitted,
    BeaconCreated,
    BeaconDeleted,
    BeaconTransientPose,
    Effect,
    GoalDispatched,
    Highlight,
    Mode,
    PointerEvent,
    PointerKind,
    Session,
)
from ..errors import ConfigError
from ..geometry import Frame, Pose, Quat, Vec3, yaw_from_quat
from ..navsim.grid import OccupancyGrid
from ..navsim.robot import NavGoal, NavState, NavStatus, RobotState
from ..navsim.stages import Stage
from ..store import BeaconRecord, Database
from .experiment import ExperimentRun

log = logging.getLogger(__name__)


class EventHub:
    """Fan-out of line-delimited events; slow consumers are dropped so the
    core never blocks on a client."""

    def __init__(self, buffer: int = 256):
        self._buffer = buffer
        self._lock = threading.Lock()
        self._subscribers: list[queue.Queue] = []

    def subscribe(self) -> "queue.Queue[dict]":
        q: queue.Queue = queue.Queue(maxsize=self._buffer)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, event: dict) -> None:
        with self._lock:
            dead = []
            for q in self._subscribers:
                try:
                    q.put_nowait(event)
                except queue.Full:
                    dead.append(q)
            for q in dead:
                self._subscribers.remove(q)


def beacon_to_record(b: Beacon) -> BeaconRecord:
    p, o = b.pose.position, b.pose.orientation
    return BeaconRecord(b.id, p.x, p.y, p.z, o.qx, o.qy, o.qz, o.qw)


def record_to_beacon(r: BeaconRecord, footprint) -> Beacon:
    pose = Pose(Vec3(r.x, r.y, r.z), Quat(r.qx, r.qy, r.qz, r.qw), Frame.ROBOT_MAP)
    return Beacon(r.id, pose, footprint)


def beacon_dict(b: Beacon, transient: bool = False, highlight: bool = False) -> dict:
    p, o = b.pose.position, b.pose.orientation
    return {
        "id": b.id,
        "x": p.x, "y": p.y, "z": p.z,
        "qx": o.qx, "qy": o.qy, "qz": o.qz, "qw": o.qw,
        "yaw": b.yaw,
        "length": b.footprint.length, "width": b.footprint.width, "height": b.footprint.height,
        "transient": transient,
        "highlight": highlight,
    }


def stage_dict(s: Stage) -> dict:
    return {
        "id": s.id, "cx": s.cx, "cy": s.cy, "w": s.w, "h": s.h,
        "yaw": s.yaw, "target_yaw": s.target_yaw, "yaw_tol": s.yaw_tol,
    }


class AppCore:
    """Wires the session state machine to the store, the robot and the hub.

    All mutations run under one lock, giving the totally ordered command
    stream the state machine expects; the simulator and bridge threads call
    in through the same lock.
    """

    def __init__(
        self,
        grid: OccupancyGrid,
        stages: list[Stage],
        db: Database,
        session: Session,
        dispatch_goal: Callable[[NavGoal], NavStatus],
        hub: Optional[EventHub] = None,
        experiment: Optional[ExperimentRun] = None,
    ):
        self.grid = grid
        self.stages = stages
        self.db = db
        self.session = session
        self.hub = hub if hub is not None else EventHub()
        self.experiment = experiment
        self._dispatch_goal = dispatch_goal
        self._lock = threading.RLock()
        self.robot_state = RobotState(0.0, 0.0, 0.0)
        self.nav_status = NavStatus(NavState.IDLE)

    @staticmethod
    def instantiate_stored_beacons(session: Session, db: Database) -> None:
        """Rebuild the persisted beacon set into a fresh session."""
        for r in db.records:
            try:
                session.beacons[r.id] = record_to_beacon(r, session.footprint)
            except Exception as e:
                raise ConfigError(f"database record {r.id} is not a floor beacon: {e}") from e

    # -- commands -------------------------------------------------------------

    def apply_mode(self, mode: Mode) -> None:
        with self._lock:
            effects = self.session.set_mode(mode)
            self._route(effects)

    def apply_pointer(self, ev: PointerEvent) -> None:
        with self._lock:
            effects = self.session.handle_pointer(ev)
            self._route(effects)

    def _route(self, effects: list[Effect]) -> None:
        for e in effects:
            if isinstance(e, BeaconCreated):
                if self.experiment:
                    self.experiment.log("phase_begin_add")
                self.hub.publish({"kind": "beacon_upsert", "beacon": beacon_dict(e.beacon, transient=True)})
            elif isinstance(e, Highlight):
                if e.on and self.experiment:
                    self.experiment.log("phase_begin_move")
                beacon = self.session.beacons.get(e.beacon_id)
                if beacon is not None:
                    self.hub.publish(
                        {"kind": "beacon_upsert",
                         "beacon": beacon_dict(beacon, transient=e.on, highlight=e.on)}
                    )
            elif isinstance(e, BeaconTransientPose):
                beacon = self.session.beacons[e.beacon_id]
                self.hub.publish(
                    {"kind": "beacon_upsert",
                     "beacon": beacon_dict(
                         beacon,
                         transient=e.beacon_id == self.session.transient_beacon_id,
                         highlight=e.beacon_id == self.session.highlighted_beacon_id,
                     )}
                )
            elif isinstance(e, BeaconCommitted):
                record = beacon_to_record(e.beacon)
                if e.beacon.id in self.db:
                    self.db.change(record)
                else:
                    self.db.add(record)
                if self.experiment:
                    kind = "move" if self.session.mode is Mode.MOVE else "add"
                    self.experiment.log(f"phase_commit_{kind}")
                self.hub.publish({"kind": "beacon_upsert", "beacon": beacon_dict(e.beacon)})
            elif isinstance(e, BeaconDeleted):
                if e.beacon_id in self.db:
                    self.db.delete(e.beacon_id)
                self.hub.publish({"kind": "beacon_removed", "id": e.beacon_id})
            elif isinstance(e, GoalDispatched):
                if self.experiment:
                    self.experiment.log("select")
                goal = NavGoal(
                    e.pose.position.x, e.pose.position.y, yaw_from_quat(e.pose.orientation)
                )
                status = self._dispatch_goal(goal)
                self._publish_nav_status(status)
                if status.terminal:
                    self._nav_finished(status)

    # -- robot callbacks -------------------------------------------------------

    def on_robot_tick(self, state: RobotState, t: float) -> None:
        with self._lock:
            self.robot_state = replace(state)
        self.hub.publish(
            {"kind": "robot_pose", "t": t,
             "x": state.x, "y": state.y, "yaw": state.yaw, "v": state.v, "w": state.w}
        )

    def on_robot_status(self, status: NavStatus, state: RobotState) -> None:
        with self._lock:
            self.robot_state = replace(state)
            self._publish_nav_status(status)
            if status.terminal:
                self._nav_finished(status)

    def on_external_pose(self, pose: Pose) -> None:
        try:
            yaw = yaw_from_quat(pose.orientation)
        except Exception:
            yaw = 0.0
        state = RobotState(pose.position.x, pose.position.y, yaw)
        self.on_robot_tick(state, 0.0)

    def _publish_nav_status(self, status: NavStatus) -> None:
        self.nav_status = status
        self.hub.publish(
            {"kind": "nav_status", "status": status.state.value, "reason": status.reason}
        )

    def _nav_finished(self, status: NavStatus) -> None:
        if self.experiment is None:
            return
        stage = self.experiment.current_stage
        chk = self.experiment.nav_finished(status, self.robot_state)
        if chk is not None and stage is not None:
            self.hub.publish(
                {"kind": "stage_result", "stage": stage.id,
                 "inside": chk.inside, "heading_ok": chk.heading_ok}
            )

    def on_strict_zone_exit(self, state: RobotState) -> None:
        """The robot left the stage area after entering it mid-navigation;
        the goal was cancelled and the attempt counts as failed."""
        with self._lock:
            self.robot_state = replace(state)
            self._publish_nav_status(NavStatus(NavState.IDLE))
            if self.experiment is None:
                return
            stage = self.experiment.current_stage
            chk = self.experiment.nav_aborted(self.robot_state)
            if chk is not None and stage is not None:
                self.hub.publish(
                    {"kind": "stage_result", "stage": stage.id,
                     "inside": chk.inside, "heading_ok": chk.heading_ok}
                )

    # -- snapshots --------------------------------------------------------------

    def state_snapshot(self) -> dict:
        with self._lock:
            transient = self.session.transient_beacon_id
            highlighted = self.session.highlighted_beacon_id
            anchor = self.session.anchor
            snapshot = {
                "mode": self.session.mode.value,
                "beacons": [
                    beacon_dict(b, transient=b.id == transient, highlight=b.id == highlighted)
                    for b in self.session.beacons.values()
                ],
                "robot": {
                    "x": self.robot_state.x, "y": self.robot_state.y,
                    "yaw": self.robot_state.yaw, "v": self.robot_state.v, "w": self.robot_state.w,
                },
                "nav_status": {"status": self.nav_status.state.value, "reason": self.nav_status.reason},
                "stages": [stage_dict(s) for s in self.stages],
                "map": {
                    "resolution": self.grid.resolution,
                    "origin_x": self.grid.origin_x,
                    "origin_y": self.grid.origin_y,
                    "width": self.grid.width,
                    "height": self.grid.height,
                    "rows": self.grid.to_rows(),
                },
                "anchor": {
                    "x": anchor.position.x, "y": anchor.position.y,
                    "yaw": yaw_from_quat(anchor.orientation),
                },
                "experiment": None,
            }
            if self.experiment is not None:
                stage = self.experiment.current_stage
                snapshot["experiment"] = {
                    "participant": self.experiment.participant,
                    "system": self.experiment.system.value,
                    "current_stage": stage.id if stage else None,
                    "complete": self.experiment.complete,
                }
            return snapshot

    def beacons_snapshot(self) -> list[dict]:
        with self._lock:
            transient = self.session.transient_beacon_id
            highlighted = self.session.highlighted_beacon_id
            return [
                beacon_dict(b, transient=b.id == transient, highlight=b.id == highlighted)
                for b in self.session.beacons.values()
            ]
