"""Length-framed TCP link between the beacon server and the robot side.

Wire format, bit-exact:

    [u32 LE topic_len][topic utf8][u32 LE payload_len][payload]

Topics: ``goal_pose`` and ``robot_pose`` carry 56-byte pose payloads (seven
little-endian float64: x, y, z, qx, qy, qz, qw); ``log`` carries UTF-8 text.
One robot connection at a time; the outbound goal queue has depth one and a
newer goal silently replaces an undelivered older one.
"""

from __future__ import annotations

import logging
import math
import socket
import struct
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import FrameMismatchError, FrameSizeError, ProtocolError
from .geometry import Frame as CoordFrame
from .geometry import Pose, Quat, Vec3

log = logging.getLogger(__name__)

MAX_TOPIC_LEN = 255
MAX_PAYLOAD_LEN = 16 * 1024 * 1024
POSE_MSG_LEN = 56
DEFAULT_PORT = 10000

TOPIC_GOAL = "goal_pose"
TOPIC_POSE = "robot_pose"
TOPIC_LOG = "log"

_U32 = struct.Struct("<I")
_POSE = struct.Struct("<7d")


@dataclass(frozen=True)
class WireFrame:
    topic: str
    payload: bytes


def encode_frame(topic: str, payload: bytes) -> bytes:
    topic_bytes = topic.encode("utf-8")
    if len(topic_bytes) > MAX_TOPIC_LEN:
        raise FrameSizeError(f"topic is {len(topic_bytes)} bytes, limit {MAX_TOPIC_LEN}")
    if len(payload) > MAX_PAYLOAD_LEN:
        raise FrameSizeError(f"payload is {len(payload)} bytes, limit {MAX_PAYLOAD_LEN}")
    return _U32.pack(len(topic_bytes)) + topic_bytes + _U32.pack(len(payload)) + payload


def try_decode_frame(buf: bytes) -> Optional[tuple[WireFrame, bytes]]:
    """Decode one frame from the head of ``buf``.

    Returns (frame, remaining bytes), or None when more bytes are needed;
    nothing is consumed in that case.  Length limits violated by the header
    raise ProtocolError and the connection should be dropped.
    """
    if len(buf) < 4:
        return None
    (topic_len,) = _U32.unpack_from(buf, 0)
    if topic_len > MAX_TOPIC_LEN:
        raise ProtocolError(f"declared topic length {topic_len} exceeds {MAX_TOPIC_LEN}")
    if len(buf) < 4 + topic_len + 4:
        return None
    try:
        topic = buf[4 : 4 + topic_len].decode("utf-8")
    except UnicodeDecodeError as e:
        raise ProtocolError(f"topic is not valid UTF-8: {e}") from e
    (payload_len,) = _U32.unpack_from(buf, 4 + topic_len)
    if payload_len > MAX_PAYLOAD_LEN:
        raise ProtocolError(f"declared payload length {payload_len} exceeds {MAX_PAYLOAD_LEN}")
    end = 4 + topic_len + 4 + payload_len
    if len(buf) < end:
        return None
    return WireFrame(topic, bytes(buf[4 + topic_len + 4 : end])), bytes(buf[end:])


class FrameDecoder:
    """Streaming decoder; feed arbitrary chunks, get complete frames out."""

    def __init__(self):
        self._buf = b""

    def feed(self, data: bytes) -> list[WireFrame]:
        self._buf += data
        frames: list[WireFrame] = []
        while True:
            out = try_decode_frame(self._buf)
            if out is None:
                return frames
            frame, self._buf = out
            frames.append(frame)


def encode_pose_msg(p: Pose) -> bytes:
    """56-byte pose payload; the pose must already use robot map axes."""
    if p.frame is not CoordFrame.ROBOT_MAP:
        raise FrameMismatchError("wire poses use robot map axes; convert first")
    o = p.orientation
    return _POSE.pack(p.position.x, p.position.y, p.position.z, o.qx, o.qy, o.qz, o.qw)


def decode_pose_msg(data: bytes) -> Pose:
    if len(data) != POSE_MSG_LEN:
        raise ProtocolError(f"pose payload is {len(data)} bytes, expected {POSE_MSG_LEN}")
    fields = _POSE.unpack(data)
    if not all(math.isfinite(v) for v in fields):
        raise ProtocolError("pose payload contains non-finite values")
    x, y, z, qx, qy, qz, qw = fields
    n = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
    if abs(n - 1.0) > 1e-6:
        raise ProtocolError(f"pose quaternion norm {n} deviates from 1 beyond 1e-6")
    if abs(n - 1.0) > 1e-9:
        qx, qy, qz, qw = qx / n, qy / n, qz / n, qw / n
    return Pose(Vec3(x, y, z), Quat(qx, qy, qz, qw), CoordFrame.ROBOT_MAP)


class BridgeEndpoint:
    """Server-side endpoint the robot peer connects to.

    Outbound goals go out on ``goal_pose``; inbound ``robot_pose`` frames hit
    ``on_pose`` (rate-limited) and ``log`` frames hit ``on_log``.  A protocol
    violation closes the connection and the endpoint keeps listening; an
    undelivered goal survives reconnection.
    """

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT,
        on_pose: Optional[Callable[[Pose], None]] = None,
        on_log: Optional[Callable[[str], None]] = None,
        max_pose_hz: float = 50.0,
    ):
        self._host = host
        self._requested_port = port
        self._on_pose = on_pose
        self._on_log = on_log
        self._min_pose_gap = 1.0 / max_pose_hz if max_pose_hz > 0 else 0.0
        self._lock = threading.Condition()
        self._pending_goal: Optional[bytes] = None
        self._stop = False
        self._listener: Optional[socket.socket] = None
        self._conn: Optional[socket.socket] = None
        self._threads: list[threading.Thread] = []
        self.port: Optional[int] = None

    def start(self) -> None:
        self._listener = socket.create_server((self._host, self._requested_port))
        self._listener.settimeout(0.2)
        self.port = self._listener.getsockname()[1]
        t = threading.Thread(target=self._accept_loop, name="bridge-accept", daemon=True)
        t.start()
        self._threads.append(t)

    def stop(self) -> None:
        with self._lock:
            self._stop = True
            self._lock.notify_all()
        if self._listener is not None:
            self._listener.close()
        with self._lock:
            if self._conn is not None:
                try:
                    self._conn.shutdown(socket.SHUT_RDWR)
                except OSError:
                    pass
                self._conn.close()
        for t in self._threads:
            t.join(timeout=2.0)

    def send_goal(self, pose: Pose) -> None:
        """Queue a goal for the robot; replaces any undelivered one."""
        frame = encode_frame(TOPIC_GOAL, encode_pose_msg(pose))
        with self._lock:
            self._pending_goal = frame
            self._lock.notify_all()

    @property
    def connected(self) -> bool:
        with self._lock:
            return self._conn is not None

    def _accept_loop(self) -> None:
        while not self._stop:
            try:
                conn, addr = self._listener.accept()
            except (socket.timeout, OSError):
                continue
            with self._lock:
                if self._conn is not None:
                    conn.close()  # single-robot rule: refuse extra peers
                    continue
                self._conn = conn
            log.info("robot peer connected from %s", addr)
            writer = threading.Thread(
                target=self._writer_loop, args=(conn,), name="bridge-writer", daemon=True
            )
            writer.start()
            self._threads = [t for t in self._threads if t.is_alive()]
            self._threads.append(writer)
            self._reader_loop(conn)
            with self._lock:
                if self._conn is conn:
                    self._conn = None
                self._lock.notify_all()
            conn.close()
            log.info("robot peer disconnected")

    def _reader_loop(self, conn: socket.socket) -> None:
        conn.settimeout(0.2)
        decoder = FrameDecoder()
        last_pose = -math.inf
        while not self._stop:
            try:
                data = conn.recv(65536)
            except socket.timeout:
                continue
            except OSError:
                return
            if not data:
                return
            try:
                for frame in decoder.feed(data):
                    if frame.topic == TOPIC_POSE:
                        now = time.monotonic()
                        if now - last_pose < self._min_pose_gap:
                            continue  # drop poses beyond the rate limit
                        last_pose = now
                        if self._on_pose is not None:
                            self._on_pose(decode_pose_msg(frame.payload))
                    elif frame.topic == TOPIC_LOG:
                        try:
                            text = frame.payload.decode("utf-8")
                        except UnicodeDecodeError as e:
                            raise ProtocolError(f"log payload is not valid UTF-8: {e}") from e
                        if self._on_log is not None:
                            self._on_log(text)
                    else:
                        log.debug("ignoring frame on unknown topic %r", frame.topic)
            except ProtocolError as e:
                log.warning("protocol error, dropping connection: %s", e)
                return

    def _writer_loop(self, conn: socket.socket) -> None:
        while True:
            with self._lock:
                while self._pending_goal is None and not self._stop and self._conn is conn:
                    self._lock.wait(timeout=0.2)
                if self._stop or self._conn is not conn:
                    return
                frame = self._pending_goal
                self._pending_goal = None
            try:
                conn.sendall(frame)
            except OSError:
                with self._lock:
                    # connection died before delivery: keep the goal queued
                    if self._pending_goal is None:
                        self._pending_goal = frame
                return


class BridgeClient:
    """Robot-side peer used by the simulator stub and by tests."""

    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._sock.settimeout(0.1)
        self._decoder = FrameDecoder()
        self._frames: list[WireFrame] = []

    def close(self) -> None:
        self._sock.close()

    def send_pose(self, pose: Pose) -> None:
        self._sock.sendall(encode_frame(TOPIC_POSE, encode_pose_msg(pose)))

    def send_log(self, text: str) -> None:
        self._sock.sendall(encode_frame(TOPIC_LOG, text.encode("utf-8")))

    def send_raw(self, data: bytes) -> None:
        self._sock.sendall(data)

    def recv_frame(self, timeout: float = 5.0) -> Optional[WireFrame]:
        """Next complete frame, or None if the timeout expires."""
        deadline = time.monotonic() + timeout
        while not self._frames:
            if time.monotonic() > deadline:
                return None
            try:
                data = self._sock.recv(65536)
            except socket.timeout:
                continue
            except OSError:
                return None
            if not data:
                return None
            self._frames.extend(self._decoder.feed(data))
        return self._frames.pop(0)
