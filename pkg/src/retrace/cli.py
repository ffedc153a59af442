"""Operator commands: ingest, summarize, serve, export.

Each command is a thin client of the same application layer the HTTP
handlers call, so both paths persist identical artifacts. Exit codes are
part of the contract: 0 ok, 2 parse error, 3 empty day, 4 unknown
day/session, 5 bind failure, 6 write failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from datetime import date
from pathlib import Path

from .geo import GeoParams
from .ingest import EmptyDay, IngestError, load_manifest
from .model import format_timestamp
from .reconstruction import export_episodes
from .store import (
    AnalysisParams,
    DayExists,
    DayStore,
    UnknownDay,
    UnknownSession,
    ingest_day,
    payloads_from_manifest,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_EMPTY = 3
EXIT_UNKNOWN = 4
EXIT_BIND = 5
EXIT_WRITE = 6


def params_from_env(env=os.environ) -> AnalysisParams:
    base = AnalysisParams()
    geo = GeoParams(
        radius_m=float(env.get("RADIUS_M", base.geo.radius_m)),
        min_dwell_s=float(env.get("MIN_DWELL_S", base.geo.min_dwell_s)),
        merge_radius_m=float(env.get("MERGE_RADIUS_M", base.geo.merge_radius_m)),
    )
    visual_gap_s = float(env.get("VISUAL_GAP_S", base.visual_gap_s))
    return AnalysisParams(geo=geo, visual_gap_s=visual_gap_s)


def _store(args) -> DayStore:
    return DayStore(Path(args.store))


def cmd_ingest(args) -> int:
    try:
        manifest = load_manifest(Path(args.manifest))
        payloads = payloads_from_manifest(manifest)
        outcome = ingest_day(
            _store(args),
            manifest.date,
            manifest.tz_offset_minutes,
            payloads,
            params_from_env(),
            force=args.force,
        )
    except EmptyDay as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DayExists as exc:
        print(f"error: day {exc} already ingested (use --force to replace)", file=sys.stderr)
        return 1

    print(f"ingested {outcome.date.isoformat()}")
    for key in ("fixes", "images", "events", "stay_points", "places", "transitions"):
        print(f"  {key:<12} {outcome.counts[key]}")
    for warning in outcome.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _fmt_s(seconds: float) -> str:
    return f"{int(seconds)}s" if seconds == int(seconds) else f"{seconds:.1f}s"


def cmd_summarize(args) -> int:
    store = _store(args)
    day = date.fromisoformat(args.date)
    try:
        daylog = store.load_daylog(day)
        analysis = store.load_analysis(day)
        timeline = json.loads(store.timeline_bytes(day))
    except UnknownDay:
        print(f"error: no ingested day {args.date}", file=sys.stderr)
        return EXIT_UNKNOWN

    w = daylog.window
    out = [f"day {day.isoformat()}  [{format_timestamp(w.start)} .. {format_timestamp(w.end)})", ""]

    out.append("tracks")
    for channel in ("visual", "location", "call", "sms"):
        segments = timeline[channel]["segments"]
        kinds = Counter(s["kind"] for s in segments)
        breakdown = " ".join(f"{k}={kinds[k]}" for k in sorted(kinds))
        out.append(f"  {channel:<9} {len(segments):>3} segments  {breakdown}")
    markers = Counter(m["direction"] for m in timeline["sms"].get("markers", []))
    if markers:
        out.append("  sms markers  " + " ".join(f"{d}={markers[d]}" for d in sorted(markers)))
    out.append("")

    out.append("places (by dwell)")
    for i, place in enumerate(analysis.places):
        out.append(
            f"  P{i}  {place.centroid_lat:.5f},{place.centroid_lon:.5f}"
            f"  dwell {_fmt_s(place.total_dwell_s)}  visits {len(place.visits)}"
        )
    out.append("")

    events = Counter(e.channel for e in daylog.events)
    event_totals = " ".join(f"{c}={events[c]}" for c in sorted(events)) or "none"
    out.append(f"transitions {len(analysis.transitions)}")
    out.append(f"events {event_totals}")
    out.append(f"fixes {len(daylog.fixes)}  images {len(daylog.images)}")

    print("\n".join(out))
    return EXIT_OK


def cmd_serve(args) -> int:
    import socket

    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    host = host or "127.0.0.1"

    # probe the bind first so an occupied port fails with the contracted code
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, int(port)))
    except OSError as exc:
        print(f"error: cannot bind {args.bind}: {exc}", file=sys.stderr)
        return EXIT_BIND
    finally:
        probe.close()

    app = create_app(Path(args.store), params_from_env(), ui_dir=args.ui)
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="warning")
    except KeyboardInterrupt:
        return EXIT_OK
    except SystemExit as exc:  # uvicorn exits nonzero when startup fails
        if exc.code:
            print(f"error: server failed to start on {args.bind}", file=sys.stderr)
            return EXIT_BIND
    return EXIT_OK


def cmd_export(args) -> int:
    store = _store(args)
    day = date.fromisoformat(args.date)
    try:
        session = store.load_session(day, args.session)
    except (UnknownDay, UnknownSession):
        print(f"error: no session {args.session} for {args.date}", file=sys.stderr)
        return EXIT_UNKNOWN
    text = export_episodes(session, args.format)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_WRITE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retrace", description="lifelog day ingestion, review service, and export"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument(
            "--store",
            default=os.environ.get("STORE_ROOT", "./store"),
            help="store root directory (env STORE_ROOT)",
        )

    p = sub.add_parser("ingest", help="ingest one day from a manifest")
    add_store(p)
    p.add_argument("--manifest", required=True, help="manifest JSON path")
    p.add_argument("--force", action="store_true", help="replace an already ingested day")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", help="print a textual report of an ingested day")
    add_store(p)
    p.add_argument("--date", required=True, help="day to report (YYYY-MM-DD)")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("serve", help="run the review service")
    add_store(p)
    p.add_argument(
        "--bind",
        default=os.environ.get("BIND_ADDR", "127.0.0.1:8000"),
        help="host:port to listen on (env BIND_ADDR)",
    )
    p.add_argument("--ui", default=None, help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="write a session's episodes to CSV or JSON")
    add_store(p)
    p.add_argument("--date", required=True)
    p.add_argument("--session", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
