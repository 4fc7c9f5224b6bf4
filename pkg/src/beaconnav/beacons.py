"""Beacon lifecycle state machine.

A session is always in exactly one mode (Off, Add, Move, Select, Delete).
Placement is two-phase: location setting (the beacon follows the pointer on
the floor) and direction setting (the beacon turns to face the pointer),
ended by a click that commits the pose.  Every observable change is emitted
as an Effect so that persistence, goal dispatch and UI broadcasting stay
decoupled from the state machine; replaying an effect log against an empty
session reconstructs the beacon set.

Beacons live on the floor plane: z = 0, rotation restricted to yaw.  Poses
are anchor-relative and use robot-map axes.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Union

from .errors import InvalidArgumentError, UnknownBeaconError
from .geometry import (
    AnchorPose,
    Frame,
    Pose,
    Vec3,
    anchor_to_map,
    quat_from_yaw,
    yaw_from_quat,
)

# Box footprint mirroring the real robot's body, configurable per session.
DEFAULT_FOOTPRINT = (0.39, 0.24, 0.26)

COINCIDENT_TOL = 1e-9


class Mode(Enum):
    OFF = "off"
    ADD = "add"
    MOVE = "move"
    SELECT = "select"
    DELETE = "delete"


class PhaseKind(Enum):
    IDLE = "idle"
    LOCATION_SETTING = "location_setting"
    DIRECTION_SETTING = "direction_setting"


@dataclass(frozen=True)
class Phase:
    kind: PhaseKind
    beacon_id: Optional[str] = None
    # Pose to restore when a Move placement is aborted; None for Add.
    prior_pose: Optional[Pose] = None

    @staticmethod
    def idle() -> "Phase":
        return Phase(PhaseKind.IDLE)

    @staticmethod
    def location(beacon_id: str, prior_pose: Optional[Pose] = None) -> "Phase":
        return Phase(PhaseKind.LOCATION_SETTING, beacon_id, prior_pose)

    @staticmethod
    def direction(beacon_id: str, prior_pose: Optional[Pose] = None) -> "Phase":
        return Phase(PhaseKind.DIRECTION_SETTING, beacon_id, prior_pose)


@dataclass(frozen=True)
class Footprint:
    length: float = DEFAULT_FOOTPRINT[0]
    width: float = DEFAULT_FOOTPRINT[1]
    height: float = DEFAULT_FOOTPRINT[2]

    def __post_init__(self):
        if min(self.length, self.width, self.height) <= 0:
            raise InvalidArgumentError("footprint dimensions must be positive")


@dataclass(frozen=True)
class Beacon:
    id: str
    pose: Pose  # anchor-relative, robot-map axes, z = 0, yaw-only
    footprint: Footprint = Footprint()

    def __post_init__(self):
        if abs(self.pose.position.z) > 1e-9:
            raise InvalidArgumentError("beacon must sit on the floor plane")
        yaw_from_quat(self.pose.orientation)  # raises if not yaw-only

    @property
    def yaw(self) -> float:
        return yaw_from_quat(self.pose.orientation)


class PointerKind(Enum):
    DOWN = "down"
    DRAG = "drag"
    UP = "up"
    CLICK = "click"


@dataclass(frozen=True)
class PointerEvent:
    kind: PointerKind
    x: float  # anchor-relative floor plane, meters
    y: float
    hit: Optional[str] = None  # beacon id under the pointer, None for floor

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidArgumentError("pointer floor point must be finite")


@dataclass(frozen=True)
class BeaconCreated:
    beacon: Beacon


@dataclass(frozen=True)
class BeaconTransientPose:
    beacon_id: str
    pose: Pose


@dataclass(frozen=True)
class BeaconCommitted:
    beacon: Beacon


@dataclass(frozen=True)
class BeaconDeleted:
    beacon_id: str


@dataclass(frozen=True)
class GoalDispatched:
    beacon_id: str
    pose: Pose  # absolute map frame


@dataclass(frozen=True)
class Highlight:
    beacon_id: str
    on: bool


Effect = Union[
    BeaconCreated, BeaconTransientPose, BeaconCommitted, BeaconDeleted, GoalDispatched, Highlight
]


def face_toward(beacon_x: float, beacon_y: float, pointer_x: float, pointer_y: float) -> Optional[float]:
    """Yaw that turns a beacon to face the pointer, None if they coincide."""
    dx = pointer_x - beacon_x
    dy = pointer_y - beacon_y
    if math.hypot(dx, dy) < COINCIDENT_TOL:
        return None
    return math.atan2(dy, dx)


def _floor_pose(x: float, y: float, yaw: float) -> Pose:
    return Pose(Vec3(x, y, 0.0), quat_from_yaw(yaw), Frame.ROBOT_MAP)


class Session:
    """Serialized command stream owner: one mode, at most one transient beacon.

    Mutations happen through :meth:`set_mode` and :meth:`handle_pointer`,
    both returning the effects they caused in order.
    """

    def __init__(
        self,
        anchor: Optional[AnchorPose] = None,
        footprint: Footprint = Footprint(),
        id_factory: Callable[[], str] = lambda: str(uuid.uuid4()),
    ):
        self.mode: Mode = Mode.OFF
        self.phase: Phase = Phase.idle()
        self.beacons: dict[str, Beacon] = {}
        self.anchor: AnchorPose = anchor if anchor is not None else Pose.identity()
        self.footprint = footprint
        self._new_id = id_factory

    @property
    def transient_beacon_id(self) -> Optional[str]:
        return self.phase.beacon_id if self.phase.kind is not PhaseKind.IDLE else None

    @property
    def highlighted_beacon_id(self) -> Optional[str]:
        if self.mode is Mode.MOVE and self.phase.kind is not PhaseKind.IDLE:
            return self.phase.beacon_id
        return None

    def set_mode(self, mode: Mode) -> list[Effect]:
        """Switch mode, aborting any placement in progress first."""
        effects = self._abort_transient()
        self.mode = mode
        return effects

    def _abort_transient(self) -> list[Effect]:
        if self.phase.kind is PhaseKind.IDLE:
            return []
        effects: list[Effect] = []
        bid = self.phase.beacon_id
        if self.mode is Mode.ADD:
            # The beacon never existed before this placement: destroy it.
            self.beacons.pop(bid, None)
            effects.append(BeaconDeleted(bid))
        elif self.mode is Mode.MOVE and self.phase.prior_pose is not None:
            restored = replace(self.beacons[bid], pose=self.phase.prior_pose)
            self.beacons[bid] = restored
            effects.append(BeaconTransientPose(bid, restored.pose))
            effects.append(Highlight(bid, False))
        self.phase = Phase.idle()
        return effects

    def handle_pointer(self, ev: PointerEvent) -> list[Effect]:
        """Apply one pointer event; unlisted (mode, phase, event) cells no-op."""
        if ev.hit is not None and ev.hit not in self.beacons:
            raise UnknownBeaconError(ev.hit)

        placing = self.mode in (Mode.ADD, Mode.MOVE)

        if self.phase.kind is PhaseKind.LOCATION_SETTING and placing:
            bid = self.phase.beacon_id
            if ev.kind in (PointerKind.DRAG, PointerKind.UP):
                beacon = self.beacons[bid]
                moved = replace(
                    beacon, pose=replace(beacon.pose, position=Vec3(ev.x, ev.y, 0.0))
                )
                self.beacons[bid] = moved
                if ev.kind is PointerKind.UP:
                    self.phase = Phase.direction(bid, self.phase.prior_pose)
                return [BeaconTransientPose(bid, moved.pose)]
            return []

        if self.phase.kind is PhaseKind.DIRECTION_SETTING and placing:
            bid = self.phase.beacon_id
            if ev.kind in (PointerKind.DRAG, PointerKind.CLICK):
                beacon = self._aim(bid, ev.x, ev.y)
                if ev.kind is PointerKind.DRAG:
                    return [BeaconTransientPose(bid, beacon.pose)]
                self.phase = Phase.idle()
                effects: list[Effect] = [BeaconCommitted(beacon)]
                if self.mode is Mode.MOVE:
                    effects.append(Highlight(bid, False))
                return effects
            return []

        if self.phase.kind is not PhaseKind.IDLE:
            return []

        if self.mode is Mode.ADD and ev.kind is PointerKind.DOWN and ev.hit is None:
            beacon = Beacon(self._new_id(), _floor_pose(ev.x, ev.y, 0.0), self.footprint)
            self.beacons[beacon.id] = beacon
            self.phase = Phase.location(beacon.id)
            return [BeaconCreated(beacon)]

        if self.mode is Mode.MOVE and ev.kind is PointerKind.DOWN and ev.hit is not None:
            self.phase = Phase.location(ev.hit, self.beacons[ev.hit].pose)
            return [Highlight(ev.hit, True)]

        if self.mode is Mode.SELECT and ev.kind is PointerKind.CLICK and ev.hit is not None:
            goal = anchor_to_map(self.beacons[ev.hit].pose, self.anchor)
            return [GoalDispatched(ev.hit, goal)]

        if self.mode is Mode.DELETE and ev.kind is PointerKind.CLICK and ev.hit is not None:
            del self.beacons[ev.hit]
            return [BeaconDeleted(ev.hit)]

        return []

    def _aim(self, bid: str, px: float, py: float) -> Beacon:
        # Turn the beacon to face the pointer; coincident points keep the yaw.
        beacon = self.beacons[bid]
        yaw = face_toward(beacon.pose.position.x, beacon.pose.position.y, px, py)
        if yaw is None:
            return beacon
        aimed = replace(beacon, pose=replace(beacon.pose, orientation=quat_from_yaw(yaw)))
        self.beacons[bid] = aimed
        return aimed


def replay_effects(effects: Iterable[Effect]) -> dict[str, Beacon]:
    """Rebuild the beacon set an effect log describes, starting from empty."""
    beacons: dict[str, Beacon] = {}
    for e in effects:
        if isinstance(e, BeaconCreated):
            beacons[e.beacon.id] = e.beacon
        elif isinstance(e, BeaconTransientPose):
            beacons[e.beacon_id] = replace(beacons[e.beacon_id], pose=e.pose)
        elif isinstance(e, BeaconCommitted):
            beacons[e.beacon.id] = e.beacon
        elif isinstance(e, BeaconDeleted):
            beacons.pop(e.beacon_id, None)
    return beacons
