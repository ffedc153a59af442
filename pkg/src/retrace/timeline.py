"""Compiles the four review-timeline tracks and answers window selections.

Interval convention is half-open [start, end) throughout; each track is a
partition of the day, so adjacency and point membership are unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta

from .geo import DayAnalysis, StayPoint, Transition
from .model import (
    CHANNEL_CALL,
    CHANNEL_SMS,
    ContextEvent,
    CoverageInterval,
    DayLog,
    DayWindow,
    GpsFix,
    ImageSample,
    format_timestamp,
    parse_timestamp,
    seconds_between,
)

KIND_PRESENT = "present"
KIND_ABSENT = "absent"
KIND_STATIONARY = "stationary"
KIND_TRANSITION = "transition"
KIND_CALL = "call"
KIND_COVERED_IDLE = "covered-idle"
KIND_COVERED = "covered"

DEFAULT_VISUAL_GAP_S = 600.0
BASE_DISPLAY_MS = 500


class TimelineError(Exception):
    pass


class InvalidWindow(TimelineError):
    pass


class InconsistentInputs(TimelineError):
    pass


@dataclass(frozen=True)
class Segment:
    start: datetime
    end: datetime
    kind: str
    meta: dict | None = None


@dataclass(frozen=True)
class Track:
    channel: str
    segments: tuple[Segment, ...]
    markers: tuple[tuple[datetime, str], ...] = ()


def _paint(segments: list[Segment], start, end, kind: str, meta: dict | None = None):
    """Overwrite [start, end) in a partition with a new kind, splitting as needed."""
    if start >= end:
        return segments
    out = []
    for seg in segments:
        if seg.end <= start or seg.start >= end:
            out.append(seg)
            continue
        if seg.start < start:
            out.append(replace(seg, end=start))
        if seg.end > end:
            out.append(replace(seg, start=end))
    out.append(Segment(start, end, kind, meta))
    out.sort(key=lambda s: s.start)
    return out


def _base(window: DayWindow, kind: str = KIND_ABSENT) -> list[Segment]:
    return [Segment(window.start, window.end, kind)]


def _paint_coverage(segments, coverage: list[CoverageInterval], window: DayWindow, kind: str):
    for c in coverage:
        segments = _paint(segments, max(c.start, window.start), min(c.end, window.end), kind)
    return segments


def build_visual_track(
    window: DayWindow, images: list[ImageSample], gap_s: float = DEFAULT_VISUAL_GAP_S
) -> Track:
    """Green/blue presence bar: image runs merge while gaps stay within gap_s.

    A run that collapses to an instant (a lone image) still has to be visible
    on a day-scale bar, so it widens to gap_s/10 centered on the shot,
    clamped to the day. Runs are > gap_s apart, so widened runs never touch.
    """
    segments = _base(window)
    runs: list[tuple] = []
    for img in images:
        if runs and seconds_between(runs[-1][1], img.t) <= gap_s:
            runs[-1] = (runs[-1][0], img.t)
        else:
            runs.append((img.t, img.t))
    for first, last in runs:
        if first == last:
            half = timedelta(seconds=gap_s / 20.0)
            start, end = max(first - half, window.start), min(last + half, window.end)
        else:
            start, end = first, last
        segments = _paint(segments, start, end, KIND_PRESENT)
    return Track("visual", tuple(segments))


def build_location_track(
    window: DayWindow,
    stay_points: list[StayPoint],
    transitions: list[Transition],
) -> Track:
    """Solid-green dwells, dashed-green transitions, blue elsewhere."""
    for sp in stay_points:
        if sp.arrival < window.start or sp.departure > window.end:
            raise InconsistentInputs(
                f"stay point [{format_timestamp(sp.arrival)}, "
                f"{format_timestamp(sp.departure)}] lies outside the day"
            )
    segments = _base(window)
    # stationary painted last: precedence over transition on any overlap
    for tr in transitions:
        segments = _paint(
            segments, max(tr.start, window.start), min(tr.end, window.end), KIND_TRANSITION
        )
    for sp in stay_points:
        segments = _paint(segments, sp.arrival, sp.departure, KIND_STATIONARY)
    return Track("location", tuple(segments))


def _call_spans(events: list[ContextEvent], window: DayWindow) -> list[tuple]:
    spans = []
    for ev in events:
        if ev.channel != CHANNEL_CALL:
            continue
        duration = max(ev.duration_s, 1)  # zero-duration calls still render
        end = min(ev.t + timedelta(seconds=duration), window.end)
        spans.append((ev.t, end, ev.direction))
    merged: list[list] = []
    for start, end, direction in spans:
        if merged and start < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end, direction])
    return [(s, e, d) for s, e, d in merged]


def build_call_track(
    window: DayWindow, events: list[ContextEvent], coverage: list[CoverageInterval]
) -> Track:
    """Call spans on a covered-idle background; uncovered time stays absent.

    Covered-but-idle is deliberately distinct from absent so blue genuinely
    means "no phone data", not merely "no calls". Overlapping call spans
    merge into one segment keeping the earlier call's direction.
    """
    segments = _base(window)
    segments = _paint_coverage(segments, coverage, window, KIND_COVERED_IDLE)
    for start, end, direction in _call_spans(events, window):
        segments = _paint(segments, start, end, KIND_CALL, {"direction": direction})
    return Track("call", tuple(segments))


def build_sms_track(
    window: DayWindow, events: list[ContextEvent], coverage: list[CoverageInterval]
) -> Track:
    """Instant markers per message (incoming flagged for the red line) on a
    covered/absent background."""
    segments = _base(window)
    segments = _paint_coverage(segments, coverage, window, KIND_COVERED)
    markers = tuple((ev.t, ev.direction) for ev in events if ev.channel == CHANNEL_SMS)
    return Track("sms", tuple(segments), markers)


def build_tracks(
    day: DayLog, analysis: DayAnalysis, visual_gap_s: float = DEFAULT_VISUAL_GAP_S
) -> dict[str, Track]:
    return {
        "visual": build_visual_track(day.window, list(day.images), visual_gap_s),
        "location": build_location_track(
            day.window, list(analysis.stay_points), list(analysis.transitions)
        ),
        "call": build_call_track(day.window, list(day.events), list(day.coverage_for("call"))),
        "sms": build_sms_track(day.window, list(day.events), list(day.coverage_for("sms"))),
    }


def partition_violations(track: Track, window: DayWindow) -> list[str]:
    """Check the sorted/adjacent/covering invariant; empty list when it holds."""
    problems = []
    segs = track.segments
    if not segs:
        return [f"{track.channel}: no segments"]
    if segs[0].start != window.start:
        problems.append(f"{track.channel}: first segment starts after day start")
    if segs[-1].end != window.end:
        problems.append(f"{track.channel}: last segment ends before day end")
    for m in range(len(segs)):
        if segs[m].start >= segs[m].end:
            problems.append(f"{track.channel}: segment {m} is empty or inverted")
        if m and segs[m].start != segs[m - 1].end:
            problems.append(f"{track.channel}: segments {m - 1} and {m} not adjacent")
    return problems


# --- window selection ------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class WindowSelection:
    start: datetime
    end: datetime


@dataclass(frozen=True, slots=True)
class WindowPlace:
    """A place restricted to a window: circle sizing reflects window dwell."""

    place_index: int
    centroid_lat: float
    centroid_lon: float
    dwell_s: float


@dataclass(frozen=True)
class WindowData:
    selection: WindowSelection
    frames: tuple[ImageSample, ...]
    fixes: tuple[GpsFix, ...]
    places: tuple[WindowPlace, ...]
    events: tuple[ContextEvent, ...]


def select_window(day: DayLog, analysis: DayAnalysis, sel: WindowSelection) -> WindowData:
    """Everything the data pane shows for one selected period.

    Calls are kept when their span intersects the window even if they began
    earlier; place dwell is recomputed as time actually spent inside the
    window so circle sizes stay honest under zooming.
    """
    w = day.window
    if not (w.start <= sel.start < sel.end <= w.end):
        raise InvalidWindow(
            f"selection [{format_timestamp(sel.start)}, {format_timestamp(sel.end)}) "
            "not inside the day"
        )

    frames = tuple(i for i in day.images if sel.start <= i.t < sel.end)
    fixes = tuple(f for f in day.fixes if sel.start <= f.t < sel.end)

    def event_selected(ev: ContextEvent) -> bool:
        if sel.start <= ev.t < sel.end:
            return True
        if ev.channel == CHANNEL_CALL:
            span_end = ev.t + timedelta(seconds=ev.duration_s)
            return ev.t < sel.end and span_end > sel.start
        return False

    events = tuple(ev for ev in day.events if event_selected(ev))

    places = []
    for idx, place in enumerate(analysis.places):
        dwell = 0.0
        earliest = None
        for v in place.visits:
            sp = analysis.stay_points[v]
            overlap = seconds_between(
                max(sp.arrival, sel.start), min(sp.departure, sel.end)
            )
            if overlap > 0:
                dwell += overlap
                if earliest is None or sp.arrival < earliest:
                    earliest = sp.arrival
        if dwell > 0:
            places.append((dwell, earliest, idx, place))
    places.sort(key=lambda item: (-item[0], item[1], item[2]))
    window_places = tuple(
        WindowPlace(idx, p.centroid_lat, p.centroid_lon, dwell)
        for dwell, _, idx, p in places
    )

    return WindowData(sel, frames, fixes, window_places, events)


@dataclass(frozen=True, slots=True)
class FrameStep:
    media_id: str
    t: datetime
    suggested_display_ms: int


def frame_sequence(data: WindowData) -> list[FrameStep]:
    """Playback order with per-frame pacing at 1x; the viewer divides by its
    speed factor and iterates in reverse for rewind."""
    return [FrameStep(f.media_id, f.t, BASE_DISPLAY_MS) for f in data.frames]


# --- serialized timeline document --------------------------------------------------

def track_to_dict(track: Track) -> dict:
    doc: dict = {
        "segments": [
            {
                "start": format_timestamp(s.start),
                "end": format_timestamp(s.end),
                "kind": s.kind,
                "meta": s.meta,
            }
            for s in track.segments
        ]
    }
    if track.channel == CHANNEL_SMS:
        doc["markers"] = [
            {"t": format_timestamp(t), "direction": d} for t, d in track.markers
        ]
    return doc


def timeline_to_dict(window: DayWindow, tracks: dict[str, Track]) -> dict:
    doc = {
        "date": window.date.isoformat(),
        "start": format_timestamp(window.start),
        "end": format_timestamp(window.end),
    }
    for channel in ("visual", "location", "call", "sms"):
        doc[channel] = track_to_dict(tracks[channel])
    return doc


def tracks_from_dict(doc: dict) -> dict[str, Track]:
    tracks = {}
    for channel in ("visual", "location", "call", "sms"):
        raw = doc[channel]
        segments = tuple(
            Segment(
                start=parse_timestamp(s["start"]),
                end=parse_timestamp(s["end"]),
                kind=s["kind"],
                meta=s["meta"],
            )
            for s in raw["segments"]
        )
        markers = tuple(
            (parse_timestamp(m["t"]), m["direction"]) for m in raw.get("markers", [])
        )
        tracks[channel] = Track(channel, segments, markers)
    return tracks
