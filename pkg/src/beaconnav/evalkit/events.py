"""Trial event records and the line-delimited log format.

One JSON object per line::

    {"t":12.5,"participant":"p01","system":"2d","stage":1,"kind":"select"}

``system`` is "2d" (baseline) or "mr"; ``kind`` is one of phase_begin_add,
phase_begin_move, phase_commit_add, phase_commit_move, select, nav_success,
nav_fail.  Timestamps are seconds from session start and must be
non-decreasing per participant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from ..errors import EventSequenceError, InvalidArgumentError


class System(Enum):
    BASELINE_2D = "2d"
    MR = "mr"


EVENT_KINDS = frozenset(
    {
        "phase_begin_add",
        "phase_begin_move",
        "phase_commit_add",
        "phase_commit_move",
        "select",
        "nav_success",
        "nav_fail",
    }
)


@dataclass(frozen=True)
class TrialEvent:
    t: float
    participant: str
    system: System
    stage: int
    kind: str

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise InvalidArgumentError("event time must be finite and non-negative")
        if not self.participant:
            raise InvalidArgumentError("participant id must be non-empty")
        if not 1 <= self.stage <= 4:
            raise InvalidArgumentError(f"stage must be 1..4, got {self.stage}")
        if self.kind not in EVENT_KINDS:
            raise InvalidArgumentError(f"unknown event kind {self.kind!r}")

    def to_line(self) -> str:
        return json.dumps(
            {
                "t": self.t,
                "participant": self.participant,
                "system": self.system.value,
                "stage": self.stage,
                "kind": self.kind,
            },
            separators=(",", ":"),
        )


def parse_event_line(line: str, lineno: int = 0) -> TrialEvent:
    try:
        obj = json.loads(line)
        return TrialEvent(
            float(obj["t"]), str(obj["participant"]), System(obj["system"]),
            int(obj["stage"]), str(obj["kind"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, InvalidArgumentError) as e:
        raise EventSequenceError(f"event log line {lineno}: {e}") from e


def read_event_log(path: str | Path) -> list[TrialEvent]:
    events: list[TrialEvent] = []
    last_t: dict[tuple[str, System], float] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            ev = parse_event_line(line, lineno)
            key = (ev.participant, ev.system)
            if ev.t < last_t.get(key, 0.0):
                raise EventSequenceError(
                    f"event log line {lineno}: time goes backwards for {ev.participant}/{ev.system.value}"
                )
            last_t[key] = ev.t
            events.append(ev)
    return events


def write_event_log(path: str | Path, events: Iterable[TrialEvent]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ev in events:
            f.write(ev.to_line())
            f.write("\n")
