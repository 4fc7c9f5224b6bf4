"""Objective per-stage indices and the usability questionnaire score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import EventSequenceError, IncompleteStageError, InvalidResponseError
from .events import TrialEvent


@dataclass(frozen=True)
class StageMetrics:
    actions_before_nav: int  # placement commits before the stage succeeded
    navigation_count: int  # goal dispatches (selects)
    action_time: float  # seconds spent inside committed placement phases


def compute_stage_metrics(events: Sequence[TrialEvent]) -> StageMetrics:
    """Reduce one participant/system/stage event sequence to its indices.

    The sequence must be time-ordered and end with nav_success.  A begin
    without a commit is an aborted placement: it counts toward neither the
    action number nor the action time.
    """
    if not events:
        raise IncompleteStageError("empty event sequence")
    key = (events[0].participant, events[0].system, events[0].stage)
    for ev in events:
        if (ev.participant, ev.system, ev.stage) != key:
            raise EventSequenceError("events mix participants, systems or stages")

    actions = 0
    navs = 0
    action_time = 0.0
    open_begin: TrialEvent | None = None
    last_t = 0.0
    for ev in events:
        if ev.t < last_t:
            raise EventSequenceError("event times go backwards")
        last_t = ev.t
        if ev.kind.startswith("phase_begin_"):
            open_begin = ev  # a dangling earlier begin was an abort
        elif ev.kind.startswith("phase_commit_"):
            if open_begin is None or open_begin.kind[len("phase_begin_"):] != ev.kind[len("phase_commit_"):]:
                raise EventSequenceError(f"commit {ev.kind!r} without matching begin")
            actions += 1
            action_time += ev.t - open_begin.t
            open_begin = None
        elif ev.kind == "select":
            navs += 1
        elif ev.kind in ("nav_success", "nav_fail"):
            if navs == 0:
                raise EventSequenceError("navigation outcome without a select")
    if events[-1].kind != "nav_success":
        raise IncompleteStageError("stage did not end with a successful navigation")
    if actions == 0:
        raise EventSequenceError("stage completed without any placement commit")
    return StageMetrics(actions, navs, action_time)


@dataclass(frozen=True)
class SusResponse:
    """Ten questionnaire ratings, each 0..4; odd-numbered questions are
    phrased positively, even-numbered negatively."""

    ratings: tuple[int, ...]

    def __post_init__(self):
        if len(self.ratings) != 10:
            raise InvalidResponseError(f"expected 10 ratings, got {len(self.ratings)}")
        for r in self.ratings:
            if not isinstance(r, int) or isinstance(r, bool) or not 0 <= r <= 4:
                raise InvalidResponseError(f"rating {r!r} outside 0..4")


def sus_score(response: SusResponse | Iterable[int]) -> float:
    """Usability score 0..100: positive items contribute their rating,
    negative items contribute 4 minus it, the sum scaled by 2.5."""
    if not isinstance(response, SusResponse):
        response = SusResponse(tuple(response))
    total = 0
    for idx, r in enumerate(response.ratings):
        total += r if (idx + 1) % 2 == 1 else 4 - r
    return 2.5 * total
