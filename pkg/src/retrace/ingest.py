"""Channel file parsers and day assembly.

CSV is the canonical interchange for every channel; GPX is accepted as an
alternate for location only. Headers are mandatory and byte-exact.
"""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from .model import (
    CHANNEL_CALL,
    CHANNEL_SMS,
    CHANNELS,
    ContextEvent,
    CoverageInterval,
    DayLog,
    DayWindow,
    GpsFix,
    ImageSample,
    TimestampError,
    format_timestamp,
    parse_timestamp,
    validate_day,
)

GPS_HEADER = "timestamp,lat,lon"
CONTEXT_HEADER = "timestamp,channel,direction,duration_s"
IMAGES_HEADER = "timestamp,path"
COVERAGE_HEADER = "channel,start,end"

_DIRECTIONS = {"in": "incoming", "out": "outgoing"}


class IngestError(Exception):
    """Base class for all channel-parsing and assembly failures."""


class MissingHeader(IngestError):
    def __init__(self, expected: str):
        super().__init__(f"missing or wrong header, expected {expected!r}")
        self.expected = expected


class MalformedRow(IngestError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class ConflictingFix(IngestError):
    def __init__(self, t):
        super().__init__(f"two fixes at {format_timestamp(t)} with different coordinates")
        self.t = t


class InvalidDuration(IngestError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class DuplicatePath(IngestError):
    def __init__(self, path: str):
        super().__init__(f"duplicate image path {path!r}")
        self.path = path


class EmptyInterval(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: coverage interval has start >= end")
        self.line_no = line_no


class MalformedDocument(IngestError):
    pass


class EmptyDay(IngestError):
    def __init__(self):
        super().__init__("every channel is empty")


class ManifestError(IngestError):
    pass


def _rows(text: str, header: str):
    """Yield (line_no, row) for each data row after checking the exact header."""
    lines = text.splitlines()
    if not lines or lines[0] != header:
        raise MissingHeader(header)
    reader = csv.reader(io.StringIO(text))
    for row in reader:
        if reader.line_num == 1 or not row:
            continue
        yield reader.line_num, row


def _parse_ts(raw: str, line_no: int):
    try:
        return parse_timestamp(raw)
    except TimestampError as exc:
        raise MalformedRow(line_no, str(exc)) from exc


def parse_gps_csv(text: str) -> list[GpsFix]:
    """Parse ``timestamp,lat,lon`` rows into fixes, sorted and deduplicated.

    Exact duplicate rows collapse to one; two rows at the same instant with
    different coordinates are a conflict the operator must resolve upstream.
    """
    by_t: dict = {}
    for line_no, row in _rows(text, GPS_HEADER):
        if len(row) != 3:
            raise MalformedRow(line_no, f"expected 3 columns, got {len(row)}")
        t = _parse_ts(row[0], line_no)
        try:
            lat, lon = float(row[1]), float(row[2])
        except ValueError:
            raise MalformedRow(line_no, "unparseable coordinate") from None
        if lat != lat or lon != lon:
            raise MalformedRow(line_no, "NaN coordinate")
        if not -90.0 <= lat <= 90.0:
            raise MalformedRow(line_no, f"latitude {lat} out of bounds")
        if not -180.0 <= lon <= 180.0:
            raise MalformedRow(line_no, f"longitude {lon} out of bounds")
        fix = GpsFix(t, lat, lon)
        prior = by_t.get(t)
        if prior is not None and prior != fix:
            raise ConflictingFix(t)
        by_t[t] = fix
    return [by_t[t] for t in sorted(by_t)]


def parse_gpx(text: str) -> tuple[list[GpsFix], list[str]]:
    """Parse a GPX 1.1 document into the same fix list parse_gps_csv yields.

    Track points without a ``time`` child carry no usable instant; they are
    skipped and reported in the warnings list rather than failing the file.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not well-formed GPX: {exc}") from exc

    warnings: list[str] = []
    by_t: dict = {}
    n = 0
    for elem in root.iter():
        if elem.tag.rsplit("}", 1)[-1] != "trkpt":
            continue
        n += 1
        time_text = None
        for child in elem:
            if child.tag.rsplit("}", 1)[-1] == "time":
                time_text = child.text
                break
        if time_text is None:
            warnings.append(f"trkpt #{n} has no <time>, skipped")
            continue
        try:
            t = parse_timestamp(time_text)
            lat = float(elem.attrib["lat"])
            lon = float(elem.attrib["lon"])
        except (TimestampError, KeyError, ValueError) as exc:
            raise MalformedDocument(f"trkpt #{n}: {exc}") from exc
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            raise MalformedDocument(f"trkpt #{n}: coordinate out of bounds")
        fix = GpsFix(t, lat, lon)
        prior = by_t.get(t)
        if prior is not None and prior != fix:
            raise ConflictingFix(t)
        by_t[t] = fix
    return [by_t[t] for t in sorted(by_t)], warnings


def parse_context_csv(text: str) -> list[ContextEvent]:
    """Parse ``timestamp,channel,direction,duration_s`` rows into events."""
    events: list[tuple] = []
    for line_no, row in _rows(text, CONTEXT_HEADER):
        if len(row) != 4:
            raise MalformedRow(line_no, f"expected 4 columns, got {len(row)}")
        t = _parse_ts(row[0], line_no)
        channel = row[1]
        if channel not in (CHANNEL_CALL, CHANNEL_SMS):
            raise MalformedRow(line_no, f"unknown channel {channel!r}")
        direction = _DIRECTIONS.get(row[2])
        if direction is None:
            raise MalformedRow(line_no, f"unknown direction {row[2]!r}")
        try:
            duration = int(row[3])
        except ValueError:
            raise MalformedRow(line_no, "unparseable duration") from None
        if duration < 0:
            raise InvalidDuration(line_no, "negative duration")
        if channel == CHANNEL_SMS and duration != 0:
            raise InvalidDuration(line_no, "sms events must have zero duration")
        events.append((t, len(events), ContextEvent(t, channel, direction, duration)))
    events.sort(key=lambda item: (item[0], item[1]))
    return [ev for _, _, ev in events]


def parse_image_manifest(text: str, day: date) -> list[ImageSample]:
    """Parse ``timestamp,path`` rows into image samples.

    media_id is deterministic: the date joined with the zero-padded index of
    the row's position once sorted by time, so re-ingesting the same manifest
    always yields the same ids.
    """
    rows: list[tuple] = []
    seen_paths: set[str] = set()
    for line_no, row in _rows(text, IMAGES_HEADER):
        if len(row) != 2:
            raise MalformedRow(line_no, f"expected 2 columns, got {len(row)}")
        t = _parse_ts(row[0], line_no)
        path = row[1]
        if not path:
            raise MalformedRow(line_no, "empty path")
        if path in seen_paths:
            raise DuplicatePath(path)
        seen_paths.add(path)
        rows.append((t, len(rows), path))
    rows.sort(key=lambda item: (item[0], item[1]))
    return [
        ImageSample(t, f"{day.isoformat()}#{i:06d}", path)
        for i, (t, _, path) in enumerate(rows)
    ]


def merge_intervals(intervals: list[tuple]) -> list[tuple]:
    """Union of (start, end) pairs; overlapping or touching pairs coalesce."""
    merged: list[list] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


def parse_coverage_csv(text: str) -> list[CoverageInterval]:
    """Parse ``channel,start,end`` rows; same-channel overlaps merge to their union."""
    per_channel: dict[str, list[tuple]] = {}
    for line_no, row in _rows(text, COVERAGE_HEADER):
        if len(row) != 3:
            raise MalformedRow(line_no, f"expected 3 columns, got {len(row)}")
        channel = row[0]
        if channel not in CHANNELS:
            raise MalformedRow(line_no, f"unknown channel {channel!r}")
        start = _parse_ts(row[1], line_no)
        end = _parse_ts(row[2], line_no)
        if start >= end:
            raise EmptyInterval(line_no)
        per_channel.setdefault(channel, []).append((start, end))
    out: list[CoverageInterval] = []
    for channel in CHANNELS:
        for start, end in merge_intervals(per_channel.get(channel, [])):
            out.append(CoverageInterval(channel, start, end))
    return out


# --- writers (canonical CSV forms, used for exports and round-trip checks) -----

def write_gps_csv(fixes: list[GpsFix]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(GPS_HEADER.split(","))
    for f in fixes:
        w.writerow([format_timestamp(f.t), repr(f.lat), repr(f.lon)])
    return out.getvalue()


def write_context_csv(events: list[ContextEvent]) -> str:
    reverse = {v: k for k, v in _DIRECTIONS.items()}
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CONTEXT_HEADER.split(","))
    for e in events:
        w.writerow([format_timestamp(e.t), e.channel, reverse[e.direction], e.duration_s])
    return out.getvalue()


def write_image_manifest(images: list[ImageSample]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(IMAGES_HEADER.split(","))
    for i in images:
        w.writerow([format_timestamp(i.t), i.path])
    return out.getvalue()


def write_coverage_csv(intervals: list[CoverageInterval]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COVERAGE_HEADER.split(","))
    for c in intervals:
        w.writerow([c.channel, format_timestamp(c.start), format_timestamp(c.end)])
    return out.getvalue()


# --- manifest and assembly ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class IngestManifest:
    """Which files make up one day's ingestion."""

    date: date
    tz_offset_minutes: int = 0
    gps_path: Path | None = None
    context_path: Path | None = None
    images_path: Path | None = None
    coverage_path: Path | None = None

    def __post_init__(self):
        if not (self.gps_path or self.context_path or self.images_path):
            raise ManifestError("manifest names no channel file")


def load_manifest(path: Path) -> IngestManifest:
    """Read a manifest document; relative channel paths resolve against it."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        day = date.fromisoformat(doc["date"])
    except (KeyError, ValueError) as exc:
        raise ManifestError(f"manifest missing/invalid date: {exc}") from exc

    def resolve(key: str) -> Path | None:
        value = doc.get(key)
        return None if value is None else (path.parent / value)

    return IngestManifest(
        date=day,
        tz_offset_minutes=int(doc.get("tz_offset_minutes", 0)),
        gps_path=resolve("gps"),
        context_path=resolve("context"),
        images_path=resolve("images"),
        coverage_path=resolve("coverage"),
    )


def default_coverage(window: DayWindow, fixes, images, events) -> list[CoverageInterval]:
    """Per-channel [first event, last event] spans when no coverage log exists.

    Before the first and after the last event of a channel we cannot tell
    "device off" from "device idle", so that time stays uncovered. Calls
    extend to the end of their duration. A channel whose span collapses to a
    point yields nothing (an interval needs start < end).
    """
    spans: list[tuple] = []
    if fixes:
        spans.append(("location", fixes[0].t, fixes[-1].t))
    if images:
        spans.append(("visual", images[0].t, images[-1].t))
    calls = [e for e in events if e.channel == CHANNEL_CALL]
    if calls:
        start = min(e.t for e in calls)
        end = max(e.t + timedelta(seconds=e.duration_s) for e in calls)
        spans.append(("call", start, end))
    sms = [e for e in events if e.channel == CHANNEL_SMS]
    if sms:
        spans.append(("sms", sms[0].t, sms[-1].t))

    out = []
    for channel, start, end in spans:
        end = min(end, window.end)
        if start < end:
            out.append(CoverageInterval(channel, start, end))
    return out


def assemble_day(
    day: date,
    tz_offset_minutes: int = 0,
    fixes: list[GpsFix] | None = None,
    images: list[ImageSample] | None = None,
    events: list[ContextEvent] | None = None,
    coverage: list[CoverageInterval] | None = None,
) -> tuple[DayLog, list[str]]:
    """Build a validated DayLog from parsed channels.

    Samples outside the day window are dropped with a warning (device clocks
    drift across midnight; silent loss would be worse). ``coverage=None``
    means no coverage log was supplied and per-channel defaults apply.
    """
    window = DayWindow.for_date(day, tz_offset_minutes)
    warnings: list[str] = []

    def keep_in_window(items, label: str):
        kept = [x for x in items or [] if window.contains(x.t)]
        dropped = len(items or []) - len(kept)
        if dropped:
            warnings.append(f"dropped {dropped} {label} sample(s) outside the day window")
        return kept

    fixes = keep_in_window(fixes, "location")
    images = keep_in_window(images, "visual")
    events = keep_in_window(events, "context")

    if not fixes and not images and not events:
        raise EmptyDay()

    if coverage is None:
        coverage = default_coverage(window, fixes, images, events)
    else:
        clipped = []
        for c in coverage:
            start, end = max(c.start, window.start), min(c.end, window.end)
            if start < end:
                if (start, end) != (c.start, c.end):
                    warnings.append(f"clipped {c.channel} coverage interval to the day window")
                clipped.append(CoverageInterval(c.channel, start, end))
            else:
                warnings.append(f"dropped {c.channel} coverage interval outside the day window")
        coverage = clipped

    day = DayLog(
        window=window,
        fixes=tuple(fixes),
        images=tuple(images),
        events=tuple(events),
        coverage=tuple(coverage),
    )
    violations = validate_day(day)
    if violations:  # parser contracts should make this unreachable
        raise IngestError("assembled day fails validation: " + "; ".join(map(str, violations)))
    return day, warnings
