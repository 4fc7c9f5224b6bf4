"""Command line entry points.

    beaconnav serve --map M --stages S --db D --http-port P --bridge-port Q \
        --tick-hz R [--experiment --participant ID --system 2d|mr] [--external-robot]

    beaconnav report --events LOG [--events LOG2 ...] [--sus CSV] [--csv OUT]

Exit codes: 0 clean shutdown, 2 configuration error, 3 runtime fatal.
"""

from __future__ import annotations

import argparse
import logging
import signal
import sys
import threading
from pathlib import Path

from .beacons import Footprint
from .errors import BeaconNavError, ConfigError
from .evalkit import System, compare_systems, parse_sus_csv, read_event_log
from .server import Server, ServerConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _triple(text: str, what: str) -> tuple[float, float, float]:
    parts = text.split()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"{what} must be three numbers, e.g. '0 0 0'")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beaconnav")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the beacon navigation server")
    serve.add_argument("--map", required=True, type=Path, help="occupancy map file")
    serve.add_argument("--stages", type=Path, help="experiment stage file")
    serve.add_argument("--db", required=True, type=Path, help="beacon database file")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--http-port", type=int, default=8080)
    serve.add_argument("--bridge-port", type=int, default=10000)
    serve.add_argument("--tick-hz", type=float, default=20.0)
    serve.add_argument("--anchor", type=lambda s: _triple(s, "--anchor"),
                       default=(0.0, 0.0, 0.0), help="'x y yaw' of the anchor in the map")
    serve.add_argument("--robot-start", type=lambda s: _triple(s, "--robot-start"),
                       default=(0.0, 0.0, 0.0), help="'x y yaw' initial robot pose")
    serve.add_argument("--footprint", type=lambda s: _triple(s, "--footprint"),
                       default=(0.39, 0.24, 0.26), help="'length width height' in meters")
    serve.add_argument("--experiment", action="store_true")
    serve.add_argument("--participant")
    serve.add_argument("--system", choices=["2d", "mr"])
    serve.add_argument("--event-log", type=Path, help="experiment event log output path")
    serve.add_argument("--strict-stage", action="store_true",
                       help="fail a navigation that exits the stage area after entering it")
    serve.add_argument("--external-robot", action="store_true",
                       help="send goals to the TCP bridge instead of the built-in simulator")

    report = sub.add_parser("report", help="build the two-system comparison report")
    report.add_argument("--events", action="append", required=True, type=Path,
                        help="event log file; repeat to merge sessions")
    report.add_argument("--sus", type=Path, help="questionnaire CSV")
    report.add_argument("--csv", type=Path, help="write the CSV report here")
    report.add_argument("--alternative", default="two-sided",
                        choices=["two-sided", "greater", "less"])
    return parser


def cmd_serve(args: argparse.Namespace) -> int:
    config = ServerConfig(
        map_path=args.map,
        stages_path=args.stages,
        db_path=args.db,
        host=args.host,
        http_port=args.http_port,
        bridge_port=args.bridge_port,
        tick_hz=args.tick_hz,
        anchor_xyyaw=args.anchor,
        robot_start=args.robot_start,
        footprint=Footprint(*args.footprint),
        experiment=args.experiment,
        participant=args.participant,
        system=System(args.system) if args.system else None,
        event_log_path=args.event_log,
        strict_stage_containment=args.strict_stage,
        external_robot=args.external_robot,
    )
    try:
        server = Server(config)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    stop = threading.Event()

    def handle_signal(signum, frame):
        log.info("signal %d, shutting down", signum)
        stop.set()

    signal.signal(signal.SIGINT, handle_signal)
    signal.signal(signal.SIGTERM, handle_signal)
    try:
        print(f"http://{config.host}:{server.http_port}  bridge port {server.bridge_port or config.bridge_port}", flush=True)
        server.run_forever(stop)
    except BeaconNavError as e:
        print(f"fatal: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        events = []
        for path in args.events:
            events.extend(read_event_log(path))
        sus = parse_sus_csv(args.sus) if args.sus else None
        report = compare_systems(events, sus=sus, alternative=args.alternative)
    except (BeaconNavError, OSError) as e:
        print(f"report error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.csv:
        args.csv.write_text(report.to_csv(), encoding="utf-8")
    print(report.to_text())
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    return cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())
