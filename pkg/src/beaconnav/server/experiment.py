"""Experiment session harness: auto-logged trial events and stage progression.

Every placement begin/commit and goal dispatch is written to the event log
as it happens; when a navigation terminates, the current stage's containment
and heading are checked and the run advances only on a fully successful
navigation (robot succeeded, footprint inside the area, heading within
tolerance)."""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional, TextIO

from ..beacons import Footprint
from ..evalkit.events import System, TrialEvent
from ..navsim.robot import NavState, NavStatus, RobotState
from ..navsim.stages import Stage, StageCheck, check_stage


class ExperimentRun:
    """One participant/system pass over the stage sequence."""

    def __init__(
        self,
        log_path: Path,
        participant: str,
        system: System,
        stages: list[Stage],
        footprint: Footprint,
    ):
        if not stages:
            raise ValueError("experiment needs at least one stage")
        self.participant = participant
        self.system = system
        self.stages = stages
        self.footprint = footprint
        self.stage_index = 0
        self.complete = False
        self._t0 = time.monotonic()
        self._file: TextIO = open(log_path, "w", encoding="utf-8")
        self.log_path = Path(log_path)

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    @property
    def current_stage(self) -> Optional[Stage]:
        if self.complete:
            return None
        return self.stages[self.stage_index]

    def log(self, kind: str) -> None:
        stage = self.current_stage
        if stage is None:
            return
        ev = TrialEvent(
            time.monotonic() - self._t0, self.participant, self.system, stage.id, kind
        )
        self._file.write(ev.to_line())
        self._file.write("\n")
        self._file.flush()

    def nav_aborted(self, robot: RobotState) -> Optional[StageCheck]:
        """Forced failure (strict containment rule): log and report the check."""
        stage = self.current_stage
        if stage is None:
            return None
        chk = check_stage(stage, robot, self.footprint)
        self.log("nav_fail")
        return chk

    def nav_finished(self, status: NavStatus, robot: RobotState) -> Optional[StageCheck]:
        """Record the outcome of a terminated navigation; returns the stage
        check, or None when the run is already complete."""
        stage = self.current_stage
        if stage is None:
            return None
        chk = check_stage(stage, robot, self.footprint)
        success = status.state is NavState.SUCCEEDED and chk.inside and chk.heading_ok
        self.log("nav_success" if success else "nav_fail")
        if success:
            self.stage_index += 1
            if self.stage_index >= len(self.stages):
                self.complete = True
                self._file.flush()
        return chk
