"""Operator HTTP API.

GET /state            consistent snapshot for console bootstrap
GET /beacons          beacon list
POST /mode            {"mode": "off|add|move|select|delete"}
POST /pointer         {"kind": "down|drag|up|click", "x": m, "y": m, "hit": id|null}
GET /events           server-push stream, one JSON event per line
"""

from __future__ import annotations

import json
import logging
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..beacons import Mode, PointerEvent, PointerKind
from ..errors import InvalidArgumentError, UnknownBeaconError
from .core import AppCore

log = logging.getLogger(__name__)


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, core: AppCore):
        super().__init__(addr, ApiHandler)
        self.core = core
        self.stopping = threading.Event()


class ApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: ApiServer

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("http: " + fmt, *args)

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        if length <= 0:
            raise ValueError("missing request body")
        obj = json.loads(self.rfile.read(length))
        if not isinstance(obj, dict):
            raise ValueError("request body must be a JSON object")
        return obj

    def do_OPTIONS(self):
        # CORS preflight for the browser console
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        core = self.server.core
        if self.path == "/state":
            self._send_json(core.state_snapshot())
        elif self.path == "/beacons":
            self._send_json({"beacons": core.beacons_snapshot()})
        elif self.path == "/events":
            self._stream_events()
        else:
            self._send_json({"error": "not-found", "path": self.path}, status=404)

    def do_POST(self):
        core = self.server.core
        try:
            body = self._read_json()
        except (ValueError, json.JSONDecodeError) as e:
            self._send_json({"error": "bad-request", "detail": str(e)}, status=400)
            return
        try:
            if self.path == "/mode":
                core.apply_mode(Mode(str(body.get("mode"))))
                self._send_json({"ok": True})
            elif self.path == "/pointer":
                ev = PointerEvent(
                    PointerKind(str(body.get("kind"))),
                    float(body["x"]),
                    float(body["y"]),
                    hit=body.get("hit"),
                )
                core.apply_pointer(ev)
                self._send_json({"ok": True})
            else:
                self._send_json({"error": "not-found", "path": self.path}, status=404)
        except UnknownBeaconError as e:
            self._send_json({"error": "unknown-beacon", "id": str(e)}, status=404)
        except (ValueError, KeyError, TypeError, InvalidArgumentError) as e:
            self._send_json({"error": "bad-request", "detail": str(e)}, status=400)

    def _stream_events(self) -> None:
        core = self.server.core
        q = core.hub.subscribe()
        try:
            self.send_response(200)
            self.send_header("Content-Type", "application/x-ndjson")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            # close-delimited body: the stream ends when the connection does
            self.send_header("Connection", "close")
            self.end_headers()
            self.close_connection = True
            while not self.server.stopping.is_set():
                try:
                    event = q.get(timeout=0.25)
                except queue.Empty:
                    continue
                self.wfile.write(json.dumps(event, separators=(",", ":")).encode("utf-8"))
                self.wfile.write(b"\n")
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            core.hub.unsubscribe(q)
            self.close_connection = True
