"""Pose and quaternion algebra for the two coordinate conventions in play.

The robot's map frame is right-handed: +x forward, +y left, +z up.  The
viewer frame is left-handed: +x right, +y up, +z forward.  The unique rigid
map between them that sends forward to forward, up to up and left to left is

    robot(x, y, z) = (viewer.z, -viewer.x, viewer.y)
    viewer(x, y, z) = (-robot.y, robot.z, robot.x)

Every pose carries an explicit frame tag; mixing frames in an operation is a
hard error rather than a silent reinterpretation.  Quaternions are stored as
(qx, qy, qz, qw), kept unit-norm, and canonicalized to qw >= 0 so equal
rotations compare equal componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConstraintViolationError, FrameMismatchError, InvalidArgumentError

UNIT_NORM_TOL = 1e-9
YAW_ONLY_TOL = 1e-6


class Frame(Enum):
    ROBOT_MAP = "robot_map"
    VIEWER = "viewer"


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"non-finite component: {v!r}")


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        _require_finite(self.x, self.y, self.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def _canonical(qx: float, qy: float, qz: float, qw: float) -> tuple[float, float, float, float]:
    # Flip sign so qw >= 0; on the qw == 0 great circle use the first
    # nonzero vector component to keep the choice deterministic.
    flip = qw < 0.0
    if qw == 0.0:
        for c in (qx, qy, qz):
            if c != 0.0:
                flip = c < 0.0
                break
    if flip:
        return -qx, -qy, -qz, -qw
    return qx, qy, qz, qw


@dataclass(frozen=True)
class Quat:
    """Unit quaternion (qx, qy, qz, qw).  Constructor rejects non-unit input."""

    qx: float
    qy: float
    qz: float
    qw: float

    def __post_init__(self):
        _require_finite(self.qx, self.qy, self.qz, self.qw)
        n = math.sqrt(self.qx**2 + self.qy**2 + self.qz**2 + self.qw**2)
        if abs(n - 1.0) > UNIT_NORM_TOL:
            raise InvalidArgumentError(f"quaternion norm {n} deviates from 1 beyond {UNIT_NORM_TOL}")

    @staticmethod
    def identity() -> "Quat":
        return Quat(0.0, 0.0, 0.0, 1.0)

    @staticmethod
    def normalized(qx: float, qy: float, qz: float, qw: float) -> "Quat":
        """Build a canonical unit quaternion from unnormalized components."""
        _require_finite(qx, qy, qz, qw)
        n = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
        if n < 1e-12:
            raise InvalidArgumentError("cannot normalize a near-zero quaternion")
        return Quat(*_canonical(qx / n, qy / n, qz / n, qw / n))

    def multiply(self, other: "Quat") -> "Quat":
        """Hamilton product self * other (apply other first, then self)."""
        x1, y1, z1, w1 = self.qx, self.qy, self.qz, self.qw
        x2, y2, z2, w2 = other.qx, other.qy, other.qz, other.qw
        return Quat.normalized(
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        )

    def conjugate(self) -> "Quat":
        return Quat(*_canonical(-self.qx, -self.qy, -self.qz, self.qw))

    def rotate(self, v: Vec3) -> Vec3:
        # v' = v + 2*qw*(u x v) + 2*(u x (u x v)), u = vector part
        ux, uy, uz = self.qx, self.qy, self.qz
        cx = uy * v.z - uz * v.y
        cy = uz * v.x - ux * v.z
        cz = ux * v.y - uy * v.x
        ccx = uy * cz - uz * cy
        ccy = uz * cx - ux * cz
        ccz = ux * cy - uy * cx
        return Vec3(
            v.x + 2.0 * (self.qw * cx + ccx),
            v.y + 2.0 * (self.qw * cy + ccy),
            v.z + 2.0 * (self.qw * cz + ccz),
        )

    def to_matrix(self) -> list[list[float]]:
        """Row-major 3x3 rotation matrix."""
        x, y, z, w = self.qx, self.qy, self.qz, self.qw
        return [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]

    @staticmethod
    def from_matrix(m: list[list[float]]) -> "Quat":
        """Quaternion of a proper rotation matrix (Shepperd's method)."""
        tr = m[0][0] + m[1][1] + m[2][2]
        if tr > 0.0:
            s = math.sqrt(tr + 1.0) * 2.0
            w = 0.25 * s
            x = (m[2][1] - m[1][2]) / s
            y = (m[0][2] - m[2][0]) / s
            z = (m[1][0] - m[0][1]) / s
        elif m[0][0] > m[1][1] and m[0][0] > m[2][2]:
            s = math.sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0
            w = (m[2][1] - m[1][2]) / s
            x = 0.25 * s
            y = (m[0][1] + m[1][0]) / s
            z = (m[0][2] + m[2][0]) / s
        elif m[1][1] > m[2][2]:
            s = math.sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0
            w = (m[0][2] - m[2][0]) / s
            x = (m[0][1] + m[1][0]) / s
            y = 0.25 * s
            z = (m[1][2] + m[2][1]) / s
        else:
            s = math.sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0
            w = (m[1][0] - m[0][1]) / s
            x = (m[0][2] + m[2][0]) / s
            y = (m[1][2] + m[2][1]) / s
            z = 0.25 * s
        return Quat.normalized(x, y, z, w)


@dataclass(frozen=True)
class Pose:
    position: Vec3
    orientation: Quat
    frame: Frame

    @staticmethod
    def identity(frame: Frame = Frame.ROBOT_MAP) -> "Pose":
        return Pose(Vec3(0.0, 0.0, 0.0), Quat.identity(), frame)


# The anchor is the fiducial whose map-frame pose defines the origin of all
# beacon-relative coordinates; by default it sits at the map origin.
AnchorPose = Pose


def viewer_to_robot_pos(v: Vec3) -> Vec3:
    """Map a viewer-frame position into the robot map frame."""
    return Vec3(v.z, -v.x, v.y)


def robot_to_viewer_pos(v: Vec3) -> Vec3:
    """Map a robot-map-frame position into the viewer frame."""
    return Vec3(-v.y, v.z, v.x)


def _check_unit(q: Quat) -> None:
    n = math.sqrt(q.qx**2 + q.qy**2 + q.qz**2 + q.qw**2)
    if abs(n - 1.0) > 1e-6:
        raise InvalidArgumentError(f"quaternion norm {n} deviates from 1 beyond 1e-6")


def viewer_to_robot_quat(q: Quat) -> Quat:
    """Re-express a rotation given in viewer axes in robot map axes.

    Conjugating the rotation by the axis permutation (an improper map,
    det = -1) transforms the rotation axis and flips the angle sign, which
    on quaternion components is (qx, qy, qz, qw) -> (-qz, qx, -qy, qw).
    """
    _check_unit(q)
    return Quat(*_canonical(-q.qz, q.qx, -q.qy, q.qw))


def robot_to_viewer_quat(q: Quat) -> Quat:
    """Inverse of :func:`viewer_to_robot_quat`."""
    _check_unit(q)
    return Quat(*_canonical(q.qy, -q.qz, -q.qx, q.qw))


def viewer_to_robot_pose(p: Pose) -> Pose:
    if p.frame is not Frame.VIEWER:
        raise FrameMismatchError("expected a viewer-frame pose")
    return Pose(viewer_to_robot_pos(p.position), viewer_to_robot_quat(p.orientation), Frame.ROBOT_MAP)


def robot_to_viewer_pose(p: Pose) -> Pose:
    if p.frame is not Frame.ROBOT_MAP:
        raise FrameMismatchError("expected a robot-map-frame pose")
    return Pose(robot_to_viewer_pos(p.position), robot_to_viewer_quat(p.orientation), Frame.VIEWER)


def compose(a: Pose, b: Pose) -> Pose:
    """Rigid-transform composition a * b (b expressed relative to a)."""
    if a.frame is not b.frame:
        raise FrameMismatchError(f"cannot compose {a.frame.value} with {b.frame.value}")
    t = a.orientation.rotate(b.position)
    return Pose(
        Vec3(a.position.x + t.x, a.position.y + t.y, a.position.z + t.z),
        a.orientation.multiply(b.orientation),
        a.frame,
    )


def invert(a: Pose) -> Pose:
    """Inverse rigid transform: compose(a, invert(a)) is the identity."""
    qi = a.orientation.conjugate()
    t = qi.rotate(a.position)
    return Pose(Vec3(-t.x, -t.y, -t.z), qi, a.frame)


def quat_from_yaw(yaw: float) -> Quat:
    """Rotation about the map vertical; yaw zero points along +x."""
    _require_finite(yaw)
    return Quat(*_canonical(0.0, 0.0, math.sin(yaw / 2.0), math.cos(yaw / 2.0)))


def yaw_from_quat(q: Quat) -> float:
    """Yaw of a rotation that is (within 1e-6) purely about the vertical."""
    if math.sqrt(q.qx * q.qx + q.qy * q.qy) > YAW_ONLY_TOL:
        raise ConstraintViolationError("quaternion is not a rotation about the map vertical")
    yaw = 2.0 * math.atan2(q.qz, q.qw)
    return wrap_angle(yaw)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


def anchor_to_map(local: Pose, anchor: AnchorPose) -> Pose:
    """Express an anchor-relative pose in the absolute map frame."""
    if anchor.frame is not Frame.ROBOT_MAP or local.frame is not Frame.ROBOT_MAP:
        raise FrameMismatchError("anchor and local pose must both use robot map axes")
    if anchor == Pose.identity():
        # Anchor at the map origin: pass the pose through untouched.
        return local
    return compose(anchor, local)
