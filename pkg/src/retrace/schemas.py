"""Request/response bodies for the HTTP service.

Timestamps cross the wire as ISO-8601 strings with an explicit offset
(``2013-05-01T09:30:00Z``); parsing and formatting stay in one place in
:mod:`retrace.model`, so these fields are plain strings here.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class IngestRequest(BaseModel):
    tz_offset_minutes: int = 0
    gps_csv: str | None = None
    gpx: str | None = None
    context_csv: str | None = None
    images_csv: str | None = None
    coverage_csv: str | None = None
    force: bool = False

    @model_validator(mode="after")
    def _one_location_source(self):
        if self.gps_csv is not None and self.gpx is not None:
            raise ValueError("supply gps_csv or gpx, not both")
        return self


class IngestResponse(BaseModel):
    date: str
    counts: dict[str, int]
    warnings: list[str]


class DaySummary(BaseModel):
    date: str
    start: str
    end: str
    tz_offset_minutes: int
    counts: dict[str, int]


class DayList(BaseModel):
    days: list[str]


class PlaceOut(BaseModel):
    place_index: int
    centroid_lat: float
    centroid_lon: float
    dwell_s: float
    circle_radius_px: float


class FrameOut(BaseModel):
    media_id: str
    t: str
    suggested_display_ms: int
    media_url: str


class FixOut(BaseModel):
    t: str
    lat: float
    lon: float


class EventOut(BaseModel):
    t: str
    channel: str
    direction: str
    duration_s: float


class WindowResponse(BaseModel):
    date: str
    start: str
    end: str
    frames: list[FrameOut]
    fixes: list[FixOut]
    places: list[PlaceOut]
    events: list[EventOut]


class SessionCreated(BaseModel):
    session_id: str
    date: str


class SessionList(BaseModel):
    sessions: list[str]


class EpisodeIn(BaseModel):
    start: str
    end: str
    activity: str
    notes: str = ""
    affect: dict[str, int] = Field(default_factory=dict)


class EpisodeOut(BaseModel):
    episode_id: str
    start: str
    end: str
    activity: str
    notes: str
    affect: dict[str, int]
    created_at: str


class SessionOut(BaseModel):
    session_id: str
    date: str
    state: str
    episodes: list[EpisodeOut]


class GapOut(BaseModel):
    start: str
    end: str


class GapSummaryOut(BaseModel):
    count: int
    total_uncovered_s: float
    gaps: list[GapOut]


class ErrorBody(BaseModel):
    detail: str
