"""Shared builders: canonical instants, random traces, random day logs."""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import pytest

from retrace.geo import DayAnalysis, GeoParams, analyze_day
from retrace.model import (
    ContextEvent,
    CoverageInterval,
    DayLog,
    DayWindow,
    GpsFix,
    ImageSample,
    validate_day,
)
from retrace.timeline import (
    KIND_CALL,
    KIND_COVERED,
    KIND_COVERED_IDLE,
    KIND_PRESENT,
    KIND_STATIONARY,
    KIND_TRANSITION,
    Track,
    build_tracks,
)

DAY = date(2013, 5, 1)
FIXTURE_DIR = Path(__file__).parent / "data" / "fixture_day"


def at(hour=0, minute=0, second=0, ms=0, day=DAY) -> datetime:
    return datetime(
        day.year, day.month, day.day, hour, minute, second, ms * 1000, tzinfo=timezone.utc
    )


@pytest.fixture
def window() -> DayWindow:
    return DayWindow.for_date(DAY)


def fix(t: datetime, lat: float, lon: float) -> GpsFix:
    return GpsFix(t, lat, lon)


# --- random trace generator (dwell/move regimes) -----------------------------------

def random_trace(rng: random.Random, max_fixes: int = 200) -> list[GpsFix]:
    """Alternating dwell clusters and movement legs, strictly increasing in t.

    Dwell jitter deliberately straddles the 50 m detection radius so the
    boundary comparison gets exercised, not just clear-cut cases.
    """
    target = rng.randrange(1, max_fixes + 1)
    fixes: list[GpsFix] = []
    t = at(0) + timedelta(seconds=rng.randrange(0, 3600))
    lat = rng.uniform(-60.0, 60.0)
    lon = rng.uniform(-170.0, 170.0)
    while len(fixes) < target:
        if rng.random() < 0.55:
            spread = rng.choice([5e-5, 1.5e-4, 3e-4, 6e-4])
            for _ in range(rng.randrange(1, 26)):
                if len(fixes) >= target:
                    break
                fixes.append(
                    GpsFix(t, lat + rng.uniform(-spread, spread), lon + rng.uniform(-spread, spread))
                )
                t += timedelta(seconds=rng.randrange(5, 181))
        else:
            for _ in range(rng.randrange(1, 11)):
                if len(fixes) >= target:
                    break
                lat += rng.choice([-1.0, 1.0]) * rng.uniform(8e-4, 4e-3)
                lon += rng.choice([-1.0, 1.0]) * rng.uniform(8e-4, 4e-3)
                fixes.append(GpsFix(t, lat, lon))
                t += timedelta(seconds=rng.randrange(5, 181))
    return fixes


# --- random day-log generator -------------------------------------------------------

def random_daylog(rng: random.Random) -> DayLog:
    """A valid random day: clustered fixes, image bursts, phone events."""
    win = DayWindow.for_date(DAY, rng.choice([-720, -480, -60, 0, 60, 330, 720]))

    fixes: list[GpsFix] = []
    if rng.random() < 0.9:
        t = win.start + timedelta(seconds=rng.randrange(0, 6 * 3600))
        lat, lon = rng.uniform(-60.0, 60.0), rng.uniform(-170.0, 170.0)
        while len(fixes) < rng.randrange(2, 120) and t < win.end:
            if rng.random() < 0.6:
                for _ in range(rng.randrange(1, 20)):
                    if t >= win.end:
                        break
                    fixes.append(
                        GpsFix(t, lat + rng.uniform(-2e-4, 2e-4), lon + rng.uniform(-2e-4, 2e-4))
                    )
                    t += timedelta(seconds=rng.randrange(30, 301))
            else:
                for _ in range(rng.randrange(1, 8)):
                    if t >= win.end:
                        break
                    lat += rng.choice([-1.0, 1.0]) * rng.uniform(1e-3, 5e-3)
                    lon += rng.choice([-1.0, 1.0]) * rng.uniform(1e-3, 5e-3)
                    fixes.append(GpsFix(t, lat, lon))
                    t += timedelta(seconds=rng.randrange(30, 301))

    image_times: list[datetime] = []
    for _ in range(rng.randrange(0, 4)):
        t = win.start + timedelta(seconds=rng.randrange(0, 20 * 3600))
        for _ in range(rng.randrange(1, 30)):
            if t >= win.end:
                break
            image_times.append(t)
            t += timedelta(seconds=rng.randrange(10, 1200))
    image_times.sort()
    images = [
        ImageSample(t, f"{DAY.isoformat()}#{i:06d}", f"img/{i:06d}.png")
        for i, t in enumerate(image_times)
    ]

    events: list[ContextEvent] = []
    for _ in range(rng.randrange(0, 8)):
        t = win.start + timedelta(seconds=rng.randrange(0, 86400))
        if rng.random() < 0.5:
            events.append(ContextEvent(t, "call", rng.choice(["incoming", "outgoing"]),
                                       rng.randrange(0, 3600)))
        else:
            events.append(ContextEvent(t, "sms", rng.choice(["incoming", "outgoing"]), 0))
    events.sort(key=lambda e: e.t)

    coverage: list[CoverageInterval] = []
    for channel in ("visual", "location", "call", "sms"):
        for _ in range(rng.randrange(0, 3)):
            a = rng.randrange(0, 86399)
            b = rng.randrange(a + 1, 86400)
            coverage.append(
                CoverageInterval(
                    channel,
                    win.start + timedelta(seconds=a),
                    win.start + timedelta(seconds=b),
                )
            )

    day = DayLog(
        window=win,
        fixes=tuple(fixes),
        images=tuple(images),
        events=tuple(events),
        coverage=tuple(coverage),
    )
    assert validate_day(day) == []
    return day


def analyze(day: DayLog, params: GeoParams = GeoParams()) -> DayAnalysis:
    return analyze_day(day.fixes, day.coverage_for("location"), params)


# --- attribution checks --------------------------------------------------------------

ALLOWED_KINDS = {
    "visual": {KIND_PRESENT, "absent"},
    "location": {KIND_STATIONARY, KIND_TRANSITION, "absent"},
    "call": {KIND_CALL, KIND_COVERED_IDLE, "absent"},
    "sms": {KIND_COVERED, "absent"},
}


def kind_at(track: Track, t: datetime) -> str | None:
    for seg in track.segments:
        if seg.start <= t < seg.end:
            return seg.kind
    return None


def attribution_violations(day: DayLog, analysis: DayAnalysis, tracks: dict[str, Track]):
    """Every input sample must be visible in its track; returns findings."""
    problems: list[str] = []

    for channel, track in tracks.items():
        for seg in track.segments:
            if seg.kind not in ALLOWED_KINDS[channel]:
                problems.append(f"{channel}: unexpected kind {seg.kind!r}")

    visual = tracks["visual"]
    for img in day.images:
        # closed membership: a run's last image sits on its segment's end
        if not any(
            s.kind == KIND_PRESENT and s.start <= img.t <= s.end for s in visual.segments
        ):
            problems.append(f"visual: image at {img.t} not inside a present segment")

    location = tracks["location"]
    for sp in analysis.stay_points:
        mid = sp.arrival + (sp.departure - sp.arrival) / 2
        for t in (sp.arrival, mid):
            if kind_at(location, t) != KIND_STATIONARY:
                problems.append(f"location: stay instant {t} not stationary")
    for tr in analysis.transitions:
        mid = tr.start + (tr.end - tr.start) / 2
        for t in (tr.start, mid):
            if kind_at(location, t) != KIND_TRANSITION:
                problems.append(f"location: transition instant {t} not transition")

    call = tracks["call"]
    for ev in day.events:
        if ev.channel != "call":
            continue
        span_end = min(
            ev.t + timedelta(seconds=max(ev.duration_s, 1)), day.window.end
        )
        mid = ev.t + (span_end - ev.t) / 2
        for t in (ev.t, mid):
            if kind_at(call, t) != KIND_CALL:
                problems.append(f"call: instant {t} of a call not marked")
    for c in day.coverage_for("call"):
        mid = c.start + (c.end - c.start) / 2
        if kind_at(call, mid) not in (KIND_CALL, KIND_COVERED_IDLE):
            problems.append(f"call: covered instant {mid} rendered absent")

    sms = tracks["sms"]
    wanted = [(e.t, e.direction) for e in day.events if e.channel == "sms"]
    if list(sms.markers) != wanted:
        problems.append("sms: markers do not match sms events")
    for c in day.coverage_for("sms"):
        mid = c.start + (c.end - c.start) / 2
        if kind_at(sms, mid) != KIND_COVERED:
            problems.append(f"sms: covered instant {mid} rendered absent")

    return problems


def day_violations(day: DayLog, analysis: DayAnalysis) -> list[str]:
    """Partition plus attribution for all four tracks of one day."""
    from retrace.timeline import partition_violations

    tracks = build_tracks(day, analysis)
    problems = []
    for track in tracks.values():
        problems.extend(partition_violations(track, day.window))
    problems.extend(attribution_violations(day, analysis, tracks))
    return problems
