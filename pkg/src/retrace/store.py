"""File-backed day store: atomic JSON documents plus copied media.

Layout under the root:

    days/<date>/daylog.json
    days/<date>/analysis.json
    days/<date>/timeline.json
    days/<date>/media/<index>.<ext>
    days/<date>/sessions/<session_id>.json

Documents are replaced atomically (write temp, fsync, rename), so a crash
between two mutations leaves either the old or the new document, never a
torn one. No database: a single-researcher desk tool wants inspectable files.
"""

from __future__ import annotations

import json
import os
import re
import shutil
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from . import ingest as ingest_mod
from .geo import DayAnalysis, GeoParams, Place, StayPoint, Transition, analyze_day
from .ingest import EmptyDay, IngestManifest, ManifestError  # noqa: F401  (re-export)
from .model import (
    DayLog,
    day_from_dict,
    day_to_dict,
    format_timestamp,
    parse_timestamp,
    validate_day,
)
from .reconstruction import (
    ReconstructionSession,
    episode_from_dict,
    episode_to_dict,
)
from .timeline import (
    DEFAULT_VISUAL_GAP_S,
    build_tracks,
    partition_violations,
    timeline_to_dict,
    tracks_from_dict,
)

MEDIA_ID_RE = re.compile(r"^(\d{4}-\d{2}-\d{2})#(\d{6})$")


class StoreError(Exception):
    pass


class UnknownDay(StoreError):
    pass


class UnknownSession(StoreError):
    pass


class DayExists(StoreError):
    pass


@dataclass(frozen=True, slots=True)
class AnalysisParams:
    """Everything that shapes derived artifacts; persisted alongside them."""

    geo: GeoParams = GeoParams()
    visual_gap_s: float = DEFAULT_VISUAL_GAP_S


@dataclass(frozen=True, slots=True)
class IngestOutcome:
    date: date
    counts: dict[str, int]
    warnings: tuple[str, ...]


def dumps_document(doc: dict) -> bytes:
    """Canonical document bytes; stable for identical inputs."""
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class DayStore:
    """All persisted artifacts under one root directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    # -- paths --------------------------------------------------------------

    def day_dir(self, day: date) -> Path:
        return self.root / "days" / day.isoformat()

    def media_dir(self, day: date) -> Path:
        return self.day_dir(day) / "media"

    def _session_path(self, day: date, session_id: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9_-]+", session_id):
            raise UnknownSession(session_id)
        return self.day_dir(day) / "sessions" / f"{session_id}.json"

    # -- days -----------------------------------------------------------------

    def has_day(self, day: date) -> bool:
        return (self.day_dir(day) / "daylog.json").exists()

    def list_days(self) -> list[date]:
        days_root = self.root / "days"
        if not days_root.is_dir():
            return []
        out = []
        for entry in sorted(days_root.iterdir()):
            if (entry / "daylog.json").exists():
                out.append(date.fromisoformat(entry.name))
        return out

    def _read(self, path: Path, missing: StoreError) -> dict:
        try:
            return json.loads(path.read_bytes())
        except FileNotFoundError:
            raise missing from None

    def save_day_documents(self, day: DayLog, analysis: DayAnalysis, params: AnalysisParams):
        d = day.window.date
        self.write_document(self.day_dir(d) / "daylog.json", day_to_dict(day))
        self.write_document(
            self.day_dir(d) / "analysis.json", analysis_to_dict(analysis, params)
        )
        tracks = build_tracks(day, analysis, params.visual_gap_s)
        self.write_document(
            self.day_dir(d) / "timeline.json", timeline_to_dict(day.window, tracks)
        )

    def write_document(self, path: Path, doc: dict) -> None:
        write_atomic(path, dumps_document(doc))

    def load_daylog(self, day: date) -> DayLog:
        doc = self._read(self.day_dir(day) / "daylog.json", UnknownDay(day.isoformat()))
        return day_from_dict(doc)

    def load_analysis(self, day: date) -> DayAnalysis:
        doc = self._read(self.day_dir(day) / "analysis.json", UnknownDay(day.isoformat()))
        return analysis_from_dict(doc)

    def timeline_bytes(self, day: date) -> bytes:
        path = self.day_dir(day) / "timeline.json"
        try:
            return path.read_bytes()
        except FileNotFoundError:
            raise UnknownDay(day.isoformat()) from None

    def media_path(self, day: date, media_id: str) -> Path:
        """Resolve an opaque media id; ids are parsed, never used as paths."""
        m = MEDIA_ID_RE.match(media_id)
        if not m or m.group(1) != day.isoformat():
            raise FileNotFoundError(media_id)
        matches = sorted(self.media_dir(day).glob(f"{m.group(2)}.*"))
        if not matches:
            raise FileNotFoundError(media_id)
        return matches[0]

    # -- sessions ---------------------------------------------------------------

    def create_session(self, day: date) -> str:
        if not self.has_day(day):
            raise UnknownDay(day.isoformat())
        sessions_dir = self.day_dir(day) / "sessions"
        sessions_dir.mkdir(parents=True, exist_ok=True)
        session_id = f"s{len(list(sessions_dir.glob('s*.json'))) + 1:04d}"
        window = self.load_daylog(day).window
        self.save_session(day, session_id, ReconstructionSession(window))
        return session_id

    def list_sessions(self, day: date) -> list[str]:
        sessions_dir = self.day_dir(day) / "sessions"
        if not sessions_dir.is_dir():
            return []
        return sorted(p.stem for p in sessions_dir.glob("s*.json"))

    def load_session(self, day: date, session_id: str) -> ReconstructionSession:
        doc = self._read(self._session_path(day, session_id), UnknownSession(session_id))
        window = self.load_daylog(day).window
        return ReconstructionSession(
            window=window,
            episodes=[episode_from_dict(e) for e in doc["episodes"]],
            state=doc["state"],
        )

    def save_session(self, day: date, session_id: str, session: ReconstructionSession):
        doc = {
            "session_id": session_id,
            "date": day.isoformat(),
            "state": session.state,
            "episodes": [episode_to_dict(ep) for ep in session.episodes],
        }
        self.write_document(self._session_path(day, session_id), doc)

    def next_episode_id(self, session: ReconstructionSession) -> str:
        return f"e{len(session.episodes) + 1:04d}"


# --- analysis document -----------------------------------------------------------

def analysis_to_dict(analysis: DayAnalysis, params: AnalysisParams) -> dict:
    place_of = {}
    for p_idx, place in enumerate(analysis.places):
        for v in place.visits:
            place_of[v] = p_idx
    return {
        "params": {
            "radius_m": params.geo.radius_m,
            "min_dwell_s": params.geo.min_dwell_s,
            "earth_radius_m": params.geo.earth_radius_m,
            "merge_radius_m": params.geo.merge_radius_m,
            "visual_gap_s": params.visual_gap_s,
        },
        "stay_points": [
            {
                "centroid_lat": sp.centroid_lat,
                "centroid_lon": sp.centroid_lon,
                "arrival": format_timestamp(sp.arrival),
                "departure": format_timestamp(sp.departure),
                "member_range": list(sp.member_range),
                "place": place_of[i],
            }
            for i, sp in enumerate(analysis.stay_points)
        ],
        "transitions": [
            {
                "start": format_timestamp(tr.start),
                "end": format_timestamp(tr.end),
                "from_place": tr.from_place,
                "to_place": tr.to_place,
            }
            for tr in analysis.transitions
        ],
        "places": [
            {
                "centroid_lat": p.centroid_lat,
                "centroid_lon": p.centroid_lon,
                "total_dwell_s": p.total_dwell_s,
                "visits": list(p.visits),
            }
            for p in analysis.places
        ],
    }


def analysis_from_dict(doc: dict) -> DayAnalysis:
    stay_points = tuple(
        StayPoint(
            centroid_lat=sp["centroid_lat"],
            centroid_lon=sp["centroid_lon"],
            arrival=parse_timestamp(sp["arrival"]),
            departure=parse_timestamp(sp["departure"]),
            member_range=tuple(sp["member_range"]),
        )
        for sp in doc["stay_points"]
    )
    transitions = tuple(
        Transition(
            start=parse_timestamp(tr["start"]),
            end=parse_timestamp(tr["end"]),
            from_place=tr["from_place"],
            to_place=tr["to_place"],
        )
        for tr in doc["transitions"]
    )
    places = tuple(
        Place(
            centroid_lat=p["centroid_lat"],
            centroid_lon=p["centroid_lon"],
            total_dwell_s=p["total_dwell_s"],
            visits=tuple(p["visits"]),
        )
        for p in doc["places"]
    )
    return DayAnalysis(stay_points, transitions, places)


# --- shared ingestion pipeline ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ChannelPayloads:
    """In-memory channel texts; the HTTP body and the manifest loader both
    reduce to this so both paths persist identical artifacts."""

    gps_csv: str | None = None
    gpx: str | None = None
    context_csv: str | None = None
    images_csv: str | None = None
    coverage_csv: str | None = None
    media_base: Path | None = None


def payloads_from_manifest(manifest: IngestManifest) -> ChannelPayloads:
    def read(path: Path | None) -> str | None:
        if path is None:
            return None
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ManifestError(f"cannot read channel file {path}: {exc}") from exc

    gps_text = read(manifest.gps_path)
    is_gpx = manifest.gps_path is not None and manifest.gps_path.suffix.lower() == ".gpx"
    return ChannelPayloads(
        gps_csv=None if is_gpx else gps_text,
        gpx=gps_text if is_gpx else None,
        context_csv=read(manifest.context_path),
        images_csv=read(manifest.images_path),
        coverage_csv=read(manifest.coverage_path),
        media_base=manifest.images_path.parent if manifest.images_path else None,
    )


def ingest_day(
    store: DayStore,
    day: date,
    tz_offset_minutes: int,
    payloads: ChannelPayloads,
    params: AnalysisParams,
    force: bool = False,
) -> IngestOutcome:
    """Parse, assemble, analyze, compile, persist: the one ingestion pipeline."""
    if store.has_day(day) and not force:
        raise DayExists(day.isoformat())

    warnings: list[str] = []
    fixes = images = events = None
    coverage = None
    if payloads.gps_csv is not None:
        fixes = ingest_mod.parse_gps_csv(payloads.gps_csv)
    elif payloads.gpx is not None:
        fixes, gpx_warnings = ingest_mod.parse_gpx(payloads.gpx)
        warnings.extend(gpx_warnings)
    if payloads.context_csv is not None:
        events = ingest_mod.parse_context_csv(payloads.context_csv)
    if payloads.images_csv is not None:
        images = ingest_mod.parse_image_manifest(payloads.images_csv, day)
    if payloads.coverage_csv is not None:
        coverage = ingest_mod.parse_coverage_csv(payloads.coverage_csv)

    daylog, assembly_warnings = ingest_mod.assemble_day(
        day, tz_offset_minutes, fixes, images, events, coverage
    )
    warnings.extend(assembly_warnings)

    analysis = analyze_day(daylog.fixes, daylog.coverage_for("location"), params.geo)
    store.save_day_documents(daylog, analysis, params)
    warnings.extend(_copy_media(store, daylog, payloads.media_base))

    return IngestOutcome(
        date=day,
        counts={
            "fixes": len(daylog.fixes),
            "images": len(daylog.images),
            "events": len(daylog.events),
            "stay_points": len(analysis.stay_points),
            "places": len(analysis.places),
            "transitions": len(analysis.transitions),
        },
        warnings=tuple(warnings),
    )


def _copy_media(store: DayStore, daylog: DayLog, media_base: Path | None) -> list[str]:
    if media_base is None or not daylog.images:
        return []
    warnings = []
    base = media_base.resolve()
    dest_dir = store.media_dir(daylog.window.date)
    dest_dir.mkdir(parents=True, exist_ok=True)
    for img in daylog.images:
        src = (base / img.path).resolve()
        if not src.is_relative_to(base):
            warnings.append(f"media path {img.path!r} escapes the media directory, skipped")
            continue
        if not src.is_file():
            warnings.append(f"media file {img.path!r} not found, skipped")
            continue
        index = img.media_id.split("#", 1)[1]
        shutil.copyfile(src, dest_dir / f"{index}{src.suffix.lower()}")
    return warnings


def verify_store(store: DayStore) -> list[str]:
    """Re-read every persisted document and re-check its invariants.

    Used after crash-recovery: any prefix of atomic mutations must leave a
    store this function finds clean.
    """
    problems: list[str] = []
    for day in store.list_days():
        try:
            daylog = store.load_daylog(day)
        except Exception as exc:
            problems.append(f"{day}: daylog unreadable: {exc}")
            continue
        for violation in validate_day(daylog):
            problems.append(f"{day}: {violation}")
        try:
            store.load_analysis(day)
            tracks = tracks_from_dict(json.loads(store.timeline_bytes(day)))
        except Exception as exc:
            problems.append(f"{day}: analysis/timeline unreadable: {exc}")
            continue
        for track in tracks.values():
            problems.extend(partition_violations(track, daylog.window))
        for session_id in store.list_sessions(day):
            try:
                session = store.load_session(day, session_id)
            except Exception as exc:
                problems.append(f"{day}/{session_id}: unreadable: {exc}")
                continue
            w = daylog.window
            prev_end = None
            for i, ep in enumerate(session.episodes):
                if ep.start >= ep.end:
                    problems.append(f"{day}/{session_id}: episode {i} inverted")
                if ep.start < w.start or ep.end > w.end:
                    problems.append(f"{day}/{session_id}: episode {i} outside the day")
                if prev_end is not None and ep.start < prev_end:
                    problems.append(f"{day}/{session_id}: episode {i} overlaps its predecessor")
                prev_end = ep.end
    return problems
