"""Shared domain types for one reviewed day: channels, windows, validation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

CHANNELS = ("visual", "location", "call", "sms")

CHANNEL_CALL = "call"
CHANNEL_SMS = "sms"

DIRECTION_IN = "incoming"
DIRECTION_OUT = "outgoing"
DIRECTIONS = (DIRECTION_IN, DIRECTION_OUT)

DAY_SECONDS = 24 * 3600


class TimestampError(ValueError):
    """Raised when a timestamp string cannot be parsed."""


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp into a UTC datetime, truncated to milliseconds.

    The offset must be explicit (``Z`` or ``+hh:mm``); naive strings are
    rejected because the engine compares everything in one UTC domain.
    """
    raw = text.strip()
    if raw.endswith("Z") or raw.endswith("z"):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise TimestampError(f"unparseable timestamp {text!r}") from exc
    if dt.tzinfo is None:
        raise TimestampError(f"timestamp {text!r} has no UTC offset")
    return truncate_ms(dt.astimezone(timezone.utc))


def truncate_ms(dt: datetime) -> datetime:
    """Drop sub-millisecond precision; sources never resolve finer."""
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


def format_timestamp(dt: datetime) -> str:
    """Canonical serialized form: ISO-8601 UTC with explicit ``Z``.

    Milliseconds are emitted only when nonzero so round-trips are byte-stable.
    """
    dt = dt.astimezone(timezone.utc)
    base = dt.strftime("%Y-%m-%dT%H:%M:%S")
    if dt.microsecond:
        base += ".%03d" % (dt.microsecond // 1000)
    return base + "Z"


def seconds_between(start: datetime, end: datetime) -> float:
    return (end - start).total_seconds()


@dataclass(frozen=True, slots=True)
class DayWindow:
    """The 24 h window under review.

    ``start``/``end`` are UTC instants; ``start`` is local midnight of
    ``date`` under ``tz_offset_minutes``, ``end`` is exactly 24 h later.
    """

    date: date
    tz_offset_minutes: int
    start: datetime
    end: datetime

    @classmethod
    def for_date(cls, day: date, tz_offset_minutes: int = 0) -> "DayWindow":
        local_midnight = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
        start = local_midnight - timedelta(minutes=tz_offset_minutes)
        return cls(day, tz_offset_minutes, start, start + timedelta(seconds=DAY_SECONDS))

    def contains(self, t: datetime) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True, slots=True)
class GpsFix:
    """One location sample."""

    t: datetime
    lat: float
    lon: float


@dataclass(frozen=True, slots=True)
class ImageSample:
    """One captured image; the media bytes live elsewhere, keyed by media_id."""

    t: datetime
    media_id: str
    path: str


@dataclass(frozen=True, slots=True)
class ContextEvent:
    """One phone event (call or sms)."""

    t: datetime
    channel: str
    direction: str
    duration_s: int


@dataclass(frozen=True, slots=True)
class CoverageInterval:
    """Interval during which a channel's recording device was known active.

    Absence of coverage is what the review timeline renders as "no data",
    distinct from "covered but nothing happened".
    """

    channel: str
    start: datetime
    end: datetime


@dataclass(frozen=True, slots=True)
class DayLog:
    """All channel data for one day, sorted and window-bounded."""

    window: DayWindow
    fixes: tuple[GpsFix, ...] = ()
    images: tuple[ImageSample, ...] = ()
    events: tuple[ContextEvent, ...] = ()
    coverage: tuple[CoverageInterval, ...] = ()

    def coverage_for(self, channel: str) -> tuple[CoverageInterval, ...]:
        return tuple(c for c in self.coverage if c.channel == channel)


@dataclass(frozen=True, slots=True)
class Violation:
    """One broken invariant, naming the offending field and the rule."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def _check_utc(t, name: str, out: list[Violation]) -> bool:
    if not isinstance(t, datetime) or t.tzinfo is None or t.utcoffset() != timedelta(0):
        out.append(Violation(name, "timestamp must be UTC-aware"))
        return False
    return True


def validate_day(day: DayLog) -> list[Violation]:
    """Check every DayLog invariant; returns all violations, not just the first.

    Pure and idempotent: violations are data, never exceptions.
    """
    out: list[Violation] = []
    w = day.window

    if w.end - w.start != timedelta(seconds=DAY_SECONDS):
        out.append(Violation("window", "end - start must be exactly 24 h"))
    expected_start = (
        datetime(w.date.year, w.date.month, w.date.day, tzinfo=timezone.utc)
        - timedelta(minutes=w.tz_offset_minutes)
    )
    if w.start != expected_start:
        out.append(Violation("window.start", "must be local midnight of date under tz_offset_minutes"))

    def check_window(t: datetime, name: str) -> None:
        if not (w.start <= t < w.end):
            out.append(Violation(name, "timestamp outside [window.start, window.end)"))

    prev: datetime | None = None
    for i, fx in enumerate(day.fixes):
        name = f"fixes[{i}]"
        if not _check_utc(fx.t, f"{name}.t", out):
            continue
        check_window(fx.t, f"{name}.t")
        if math.isnan(fx.lat) or math.isnan(fx.lon):
            out.append(Violation(name, "NaN coordinate forbidden"))
        else:
            if not -90.0 <= fx.lat <= 90.0:
                out.append(Violation(f"{name}.lat", "latitude out of bounds [-90, 90]"))
            if not -180.0 <= fx.lon <= 180.0:
                out.append(Violation(f"{name}.lon", "longitude out of bounds [-180, 180]"))
        if prev is not None and fx.t <= prev:
            out.append(Violation(f"{name}.t", "fixes must be strictly increasing in t"))
        prev = fx.t

    seen_ids: set[str] = set()
    prev = None
    for i, img in enumerate(day.images):
        name = f"images[{i}]"
        if not _check_utc(img.t, f"{name}.t", out):
            continue
        check_window(img.t, f"{name}.t")
        if not img.path:
            out.append(Violation(f"{name}.path", "path must be non-empty"))
        if img.media_id in seen_ids:
            out.append(Violation(f"{name}.media_id", "media_id must be unique within the day"))
        seen_ids.add(img.media_id)
        if prev is not None and img.t < prev:
            out.append(Violation(f"{name}.t", "images must be sorted by t"))
        prev = img.t

    prev = None
    for i, ev in enumerate(day.events):
        name = f"events[{i}]"
        if not _check_utc(ev.t, f"{name}.t", out):
            continue
        check_window(ev.t, f"{name}.t")
        if ev.channel not in (CHANNEL_CALL, CHANNEL_SMS):
            out.append(Violation(f"{name}.channel", "channel must be call or sms"))
        if ev.direction not in DIRECTIONS:
            out.append(Violation(f"{name}.direction", "direction must be incoming or outgoing"))
        if ev.duration_s < 0:
            out.append(Violation(f"{name}.duration_s", "duration must be non-negative"))
        elif ev.channel == CHANNEL_SMS and ev.duration_s != 0:
            out.append(Violation(f"{name}.duration_s", "sms events must have zero duration"))
        if prev is not None and ev.t < prev:
            out.append(Violation(f"{name}.t", "events must be sorted by t"))
        prev = ev.t

    for i, cov in enumerate(day.coverage):
        name = f"coverage[{i}]"
        if cov.channel not in CHANNELS:
            out.append(Violation(f"{name}.channel", "unknown channel"))
        if not (_check_utc(cov.start, f"{name}.start", out) and _check_utc(cov.end, f"{name}.end", out)):
            continue
        if cov.start >= cov.end:
            out.append(Violation(name, "coverage interval must have start < end"))
        if cov.start < w.start or cov.end > w.end:
            out.append(Violation(name, "coverage interval outside the day window"))

    return out


# --- canonical serialized form -------------------------------------------------

def window_to_dict(w: DayWindow) -> dict:
    return {
        "date": w.date.isoformat(),
        "tz_offset_minutes": w.tz_offset_minutes,
        "start": format_timestamp(w.start),
        "end": format_timestamp(w.end),
    }


def window_from_dict(d: dict) -> DayWindow:
    return DayWindow(
        date=date.fromisoformat(d["date"]),
        tz_offset_minutes=int(d["tz_offset_minutes"]),
        start=parse_timestamp(d["start"]),
        end=parse_timestamp(d["end"]),
    )


def day_to_dict(day: DayLog) -> dict:
    return {
        "window": window_to_dict(day.window),
        "fixes": [
            {"t": format_timestamp(f.t), "lat": f.lat, "lon": f.lon} for f in day.fixes
        ],
        "images": [
            {"t": format_timestamp(i.t), "media_id": i.media_id, "path": i.path}
            for i in day.images
        ],
        "events": [
            {
                "t": format_timestamp(e.t),
                "channel": e.channel,
                "direction": e.direction,
                "duration_s": e.duration_s,
            }
            for e in day.events
        ],
        "coverage": [
            {
                "channel": c.channel,
                "start": format_timestamp(c.start),
                "end": format_timestamp(c.end),
            }
            for c in day.coverage
        ],
    }


def day_from_dict(d: dict) -> DayLog:
    return DayLog(
        window=window_from_dict(d["window"]),
        fixes=tuple(
            GpsFix(parse_timestamp(f["t"]), float(f["lat"]), float(f["lon"]))
            for f in d.get("fixes", [])
        ),
        images=tuple(
            ImageSample(parse_timestamp(i["t"]), i["media_id"], i["path"])
            for i in d.get("images", [])
        ),
        events=tuple(
            ContextEvent(
                parse_timestamp(e["t"]), e["channel"], e["direction"], int(e["duration_s"])
            )
            for e in d.get("events", [])
        ),
        coverage=tuple(
            CoverageInterval(c["channel"], parse_timestamp(c["start"]), parse_timestamp(c["end"]))
            for c in d.get("coverage", [])
        ),
    )
