"""Fixed-rate tick thread around the robot simulator.

The runner owns the simulator; goal injection and snapshots cross the
thread boundary through its lock, and callbacks fire outside the lock so
the core can call back in without a lock-order cycle."""

from __future__ import annotations

import threading
import time
from dataclasses import replace
from typing import Callable, Optional

from ..navsim.robot import NavGoal, NavStatus, RobotSim, RobotState


class SimRunner:
    def __init__(
        self,
        sim: RobotSim,
        tick_hz: float,
        on_tick: Callable[[RobotState, float], None],
        on_status_change: Callable[[NavStatus, RobotState], None],
    ):
        self.sim = sim
        self.dt = 1.0 / tick_hz
        self._on_tick = on_tick
        self._on_status = on_status_change
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._sim_time = 0.0

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, name="sim-tick", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    def set_goal(self, goal: NavGoal) -> NavStatus:
        with self._lock:
            return self.sim.set_goal(goal)

    def cancel(self) -> None:
        with self._lock:
            self.sim.cancel()

    def snapshot(self) -> tuple[RobotState, NavStatus]:
        with self._lock:
            return replace(self.sim.state), self.sim.status

    def _loop(self) -> None:
        deadline = time.monotonic()
        while not self._stop.is_set():
            deadline += self.dt
            with self._lock:
                before = self.sim.status
                self.sim.tick(self.dt)
                self._sim_time += self.dt
                state = replace(self.sim.state)
                after = self.sim.status
                t = self._sim_time
            self._on_tick(state, t)
            if after != before:
                self._on_status(after, state)
            delay = deadline - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                deadline = time.monotonic()  # fell behind: don't burst
