"""HTTP service over the day store.

Thin by design: every handler parses the request, takes the store lock it
needs, calls the same application layer the CLI uses, and serializes the
result. No analysis happens here.
"""

from __future__ import annotations

import hashlib
import mimetypes
import os
import threading
from datetime import date, datetime
from pathlib import Path
from urllib.parse import quote

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .geo import circle_radius_px
from .ingest import IngestError
from .model import TimestampError, format_timestamp, parse_timestamp, truncate_ms
from .reconstruction import (
    ChronologyViolation,
    EmptySession,
    Episode,
    InvalidEpisode,
    OutOfDay,
    SessionFinalized,
    export_episodes,
)
from .schemas import (
    DayList,
    DaySummary,
    EpisodeIn,
    EpisodeOut,
    GapOut,
    GapSummaryOut,
    IngestRequest,
    IngestResponse,
    SessionCreated,
    SessionList,
    SessionOut,
    WindowResponse,
)
from .store import (
    AnalysisParams,
    ChannelPayloads,
    DayExists,
    DayStore,
    UnknownDay,
    UnknownSession,
    ingest_day,
)
from .timeline import InvalidWindow, WindowSelection, frame_sequence, select_window

CIRCLE_R_MIN_PX = 6.0
CIRCLE_R_MAX_PX = 40.0


class _LockRegistry:
    """One lock per day or session so concurrent mutations serialize."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def __call__(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())


def _error(status: int):
    def handler(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    return handler


def create_app(
    store_root: Path | str,
    params: AnalysisParams = AnalysisParams(),
    ui_dir: Path | str | None = None,
) -> FastAPI:
    store = DayStore(store_root)
    lock_for = _LockRegistry()
    app = FastAPI(title="retrace", version="0.1.0")

    app.add_exception_handler(UnknownDay, _error(404))
    app.add_exception_handler(UnknownSession, _error(404))
    app.add_exception_handler(DayExists, _error(409))
    app.add_exception_handler(ChronologyViolation, _error(409))
    app.add_exception_handler(SessionFinalized, _error(409))
    app.add_exception_handler(EmptySession, _error(409))
    app.add_exception_handler(IngestError, _error(422))
    app.add_exception_handler(InvalidWindow, _error(400))
    app.add_exception_handler(OutOfDay, _error(400))
    app.add_exception_handler(InvalidEpisode, _error(400))

    def parse_instant(raw: str, label: str) -> datetime:
        try:
            return parse_timestamp(raw)
        except TimestampError as exc:
            raise InvalidWindow(f"{label}: {exc}") from exc

    # -- days ---------------------------------------------------------------

    @app.post("/api/days/{day}", response_model=IngestResponse, status_code=201)
    def ingest(day: date, body: IngestRequest) -> IngestResponse:
        payloads = ChannelPayloads(
            gps_csv=body.gps_csv,
            gpx=body.gpx,
            context_csv=body.context_csv,
            images_csv=body.images_csv,
            coverage_csv=body.coverage_csv,
        )
        with lock_for(day.isoformat()):
            outcome = ingest_day(
                store, day, body.tz_offset_minutes, payloads, params, body.force
            )
        return IngestResponse(
            date=outcome.date.isoformat(),
            counts=outcome.counts,
            warnings=list(outcome.warnings),
        )

    @app.get("/api/days", response_model=DayList)
    def list_days() -> DayList:
        return DayList(days=[d.isoformat() for d in store.list_days()])

    @app.get("/api/days/{day}", response_model=DaySummary)
    def day_summary(day: date) -> DaySummary:
        daylog = store.load_daylog(day)
        analysis = store.load_analysis(day)
        return DaySummary(
            date=day.isoformat(),
            start=format_timestamp(daylog.window.start),
            end=format_timestamp(daylog.window.end),
            tz_offset_minutes=daylog.window.tz_offset_minutes,
            counts={
                "fixes": len(daylog.fixes),
                "images": len(daylog.images),
                "events": len(daylog.events),
                "stay_points": len(analysis.stay_points),
                "places": len(analysis.places),
                "transitions": len(analysis.transitions),
            },
        )

    @app.get("/api/days/{day}/timeline")
    def timeline(day: date, request: Request) -> Response:
        body = store.timeline_bytes(day)
        etag = '"' + hashlib.sha256(body).hexdigest() + '"'
        candidates = request.headers.get("if-none-match", "")
        if etag in [c.strip().removeprefix("W/") for c in candidates.split(",")]:
            return Response(status_code=304, headers={"ETag": etag})
        return Response(content=body, media_type="application/json", headers={"ETag": etag})

    @app.get("/api/days/{day}/window", response_model=WindowResponse)
    def window(
        day: date,
        start: str = Query(alias="from"),
        end: str = Query(alias="to"),
    ) -> WindowResponse:
        sel = WindowSelection(
            parse_instant(start, "from"), parse_instant(end, "to")
        )
        daylog = store.load_daylog(day)
        analysis = store.load_analysis(day)
        data = select_window(daylog, analysis, sel)
        max_dwell = max((p.dwell_s for p in data.places), default=0.0)
        return WindowResponse(
            date=day.isoformat(),
            start=format_timestamp(sel.start),
            end=format_timestamp(sel.end),
            frames=[
                {
                    "media_id": step.media_id,
                    "t": format_timestamp(step.t),
                    "suggested_display_ms": step.suggested_display_ms,
                    # The id embeds "#"; quote it or clients lose the tail
                    # to the URL fragment.
                    "media_url": f"/api/media/{day.isoformat()}/{quote(step.media_id, safe='')}",
                }
                for step in frame_sequence(data)
            ],
            fixes=[
                {"t": format_timestamp(f.t), "lat": f.lat, "lon": f.lon}
                for f in data.fixes
            ],
            places=[
                {
                    "place_index": p.place_index,
                    "centroid_lat": p.centroid_lat,
                    "centroid_lon": p.centroid_lon,
                    "dwell_s": p.dwell_s,
                    "circle_radius_px": circle_radius_px(
                        p.dwell_s, max_dwell, CIRCLE_R_MIN_PX, CIRCLE_R_MAX_PX
                    ),
                }
                for p in data.places
            ],
            events=[
                {
                    "t": format_timestamp(e.t),
                    "channel": e.channel,
                    "direction": e.direction,
                    "duration_s": e.duration_s,
                }
                for e in data.events
            ],
        )

    @app.get("/api/media/{day}/{media_id}")
    def media(day: date, media_id: str) -> FileResponse:
        try:
            path = store.media_path(day, media_id)
        except FileNotFoundError:
            return JSONResponse(status_code=404, content={"detail": f"no media {media_id}"})
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(
            path,
            media_type=media_type,
            headers={"Cache-Control": "public, max-age=31536000, immutable"},
        )

    # -- review sessions ------------------------------------------------------

    @app.post("/api/days/{day}/sessions", response_model=SessionCreated, status_code=201)
    def create_session(day: date) -> SessionCreated:
        with lock_for(day.isoformat()):
            session_id = store.create_session(day)
        return SessionCreated(session_id=session_id, date=day.isoformat())

    @app.get("/api/days/{day}/sessions", response_model=SessionList)
    def list_sessions(day: date) -> SessionList:
        if not store.has_day(day):
            raise UnknownDay(day.isoformat())
        return SessionList(sessions=store.list_sessions(day))

    def session_out(day: date, session_id: str, session) -> SessionOut:
        return SessionOut(
            session_id=session_id,
            date=day.isoformat(),
            state=session.state,
            episodes=[
                EpisodeOut(
                    episode_id=ep.episode_id,
                    start=format_timestamp(ep.start),
                    end=format_timestamp(ep.end),
                    activity=ep.activity,
                    notes=ep.notes,
                    affect=dict(sorted(ep.affect.items())),
                    created_at=format_timestamp(ep.created_at),
                )
                for ep in session.episodes
            ],
        )

    @app.get("/api/days/{day}/sessions/{session_id}", response_model=SessionOut)
    def get_session(day: date, session_id: str) -> SessionOut:
        return session_out(day, session_id, store.load_session(day, session_id))

    def episode_from_body(body: EpisodeIn, episode_id: str) -> Episode:
        try:
            start = parse_timestamp(body.start)
            end = parse_timestamp(body.end)
        except TimestampError as exc:
            raise InvalidEpisode(str(exc)) from exc
        return Episode(
            episode_id=episode_id,
            start=start,
            end=end,
            activity=body.activity,
            notes=body.notes,
            affect=dict(body.affect),
            created_at=truncate_ms(datetime.now(tz=start.tzinfo)),
        )

    @app.post(
        "/api/days/{day}/sessions/{session_id}/episodes",
        response_model=SessionOut,
        status_code=201,
    )
    def append_episode(day: date, session_id: str, body: EpisodeIn) -> SessionOut:
        with lock_for(f"{day.isoformat()}/{session_id}"):
            session = store.load_session(day, session_id)
            episode = episode_from_body(body, store.next_episode_id(session))
            session.append_episode(episode)
            store.save_session(day, session_id, session)
        return session_out(day, session_id, session)

    @app.put(
        "/api/days/{day}/sessions/{session_id}/episodes/last",
        response_model=SessionOut,
    )
    def amend_last(day: date, session_id: str, body: EpisodeIn) -> SessionOut:
        with lock_for(f"{day.isoformat()}/{session_id}"):
            session = store.load_session(day, session_id)
            if not session.episodes:
                raise EmptySession("no episode to amend")
            episode = episode_from_body(body, session.episodes[-1].episode_id)
            session.amend_last_episode(episode)
            store.save_session(day, session_id, session)
        return session_out(day, session_id, session)

    @app.post(
        "/api/days/{day}/sessions/{session_id}/finalize",
        response_model=GapSummaryOut,
    )
    def finalize(day: date, session_id: str) -> GapSummaryOut:
        with lock_for(f"{day.isoformat()}/{session_id}"):
            session = store.load_session(day, session_id)
            summary = session.finalize()
            store.save_session(day, session_id, session)
        return GapSummaryOut(
            count=summary.count,
            total_uncovered_s=summary.total_uncovered_s,
            gaps=[
                GapOut(start=format_timestamp(s), end=format_timestamp(e))
                for s, e in summary.gaps
            ],
        )

    @app.get("/api/days/{day}/sessions/{session_id}/export")
    def export(day: date, session_id: str, format: str = "csv") -> Response:
        session = store.load_session(day, session_id)
        try:
            text = export_episodes(session, format)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        filename = f"{day.isoformat()}-{session_id}.{format}"
        media_type = "text/csv" if format == "csv" else "application/json"
        return PlainTextResponse(
            text,
            media_type=media_type,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    ui_dir = ui_dir or os.environ.get("RETRACE_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
