"""Chronological day-reconstruction sessions.

The reviewer enters episodes strictly forward in time; that ordering is the
method's core constraint, so the store is append-only with a single-slot
amendment escape hatch for typos in the most recent entry.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime

from .model import DayWindow, format_timestamp, parse_timestamp, seconds_between

RATING_MIN = 1
RATING_MAX = 7

CSV_FIXED_COLUMNS = ["episode_id", "start", "end", "activity", "notes"]


class ReconstructionError(Exception):
    pass


class ChronologyViolation(ReconstructionError):
    pass


class OutOfDay(ReconstructionError):
    pass


class SessionFinalized(ReconstructionError):
    pass


class EmptySession(ReconstructionError):
    pass


class InvalidEpisode(ReconstructionError):
    pass


@dataclass(frozen=True, slots=True)
class Episode:
    """One reconstructed activity with its affect ratings."""

    episode_id: str
    start: datetime
    end: datetime
    activity: str
    notes: str
    affect: dict[str, int]
    created_at: datetime


@dataclass(frozen=True, slots=True)
class GapSummary:
    """Day time no episode covers; surfaced at finalize so omissions are seen."""

    count: int
    total_uncovered_s: float
    gaps: tuple[tuple[datetime, datetime], ...]


def _check_episode(window: DayWindow, episode: Episode) -> None:
    if not episode.activity or not episode.activity.strip():
        raise InvalidEpisode("activity must be non-empty")
    if episode.start >= episode.end:
        raise InvalidEpisode("episode start must precede its end")
    for name, rating in episode.affect.items():
        if not name:
            raise InvalidEpisode("affect scale name must be non-empty")
        if not isinstance(rating, int) or not RATING_MIN <= rating <= RATING_MAX:
            raise InvalidEpisode(
                f"affect rating {name}={rating!r} outside {RATING_MIN}..{RATING_MAX}"
            )
    if episode.start < window.start or episode.end > window.end:
        raise OutOfDay("episode lies outside the day window")


@dataclass
class ReconstructionSession:
    """Episode list under the chronological-entry discipline.

    Invariants: episodes are non-overlapping, time-ordered, and entry order
    equals time order. append/amend_last/finalize are the only mutators.
    """

    window: DayWindow
    episodes: list[Episode] = field(default_factory=list)
    state: str = "open"

    def _require_open(self) -> None:
        if self.state != "open":
            raise SessionFinalized("session is finalized")

    def append_episode(self, episode: Episode) -> None:
        self._require_open()
        _check_episode(self.window, episode)
        if self.episodes and episode.start < self.episodes[-1].end:
            raise ChronologyViolation(
                f"episode starts at {format_timestamp(episode.start)}, before the "
                f"previous episode's end {format_timestamp(self.episodes[-1].end)}"
            )
        self.episodes.append(episode)

    def amend_last_episode(self, replacement: Episode) -> None:
        self._require_open()
        if not self.episodes:
            raise EmptySession("nothing to amend")
        _check_episode(self.window, replacement)
        if len(self.episodes) > 1 and replacement.start < self.episodes[-2].end:
            raise ChronologyViolation(
                "replacement starts before the preceding episode's end"
            )
        self.episodes[-1] = replacement

    def finalize(self) -> GapSummary:
        self._require_open()
        self.state = "finalized"
        return self.gap_summary()

    def gap_summary(self) -> GapSummary:
        gaps = []
        cursor = self.window.start
        for ep in self.episodes:
            if ep.start > cursor:
                gaps.append((cursor, ep.start))
            cursor = ep.end
        if cursor < self.window.end:
            gaps.append((cursor, self.window.end))
        total = sum(seconds_between(s, e) for s, e in gaps)
        return GapSummary(len(gaps), total, tuple(gaps))


# --- export / import ---------------------------------------------------------------

def _scale_columns(episodes: list[Episode]) -> list[str]:
    names: set[str] = set()
    for ep in episodes:
        names.update(ep.affect)
    return sorted(names)


def export_episodes(session: ReconstructionSession, format: str = "csv") -> str:
    """Serialize episodes for downstream analysis.

    CSV columns are the fixed five plus one column per affect scale, scales
    sorted lexicographically so the layout is deterministic.
    """
    if format == "csv":
        scales = _scale_columns(session.episodes)
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_FIXED_COLUMNS + scales)
        for ep in session.episodes:
            row = [
                ep.episode_id,
                format_timestamp(ep.start),
                format_timestamp(ep.end),
                ep.activity,
                ep.notes,
            ]
            row.extend("" if s not in ep.affect else ep.affect[s] for s in scales)
            w.writerow(row)
        return out.getvalue()
    if format == "json":
        doc = {"episodes": [episode_to_dict(ep) for ep in session.episodes]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown export format {format!r}")


def import_episodes(text: str, format: str = "csv") -> list[Episode]:
    """Read an export back; CSV carries no created_at, which defaults to start."""
    if format == "csv":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty export") from None
        if header[: len(CSV_FIXED_COLUMNS)] != CSV_FIXED_COLUMNS:
            raise ValueError("unexpected export header")
        scales = header[len(CSV_FIXED_COLUMNS):]
        episodes = []
        for row in reader:
            if not row:
                continue
            affect = {
                name: int(value)
                for name, value in zip(scales, row[len(CSV_FIXED_COLUMNS):])
                if value != ""
            }
            start = parse_timestamp(row[1])
            episodes.append(
                Episode(row[0], start, parse_timestamp(row[2]), row[3], row[4], affect, start)
            )
        return episodes
    if format == "json":
        doc = json.loads(text)
        return [episode_from_dict(d) for d in doc["episodes"]]
    raise ValueError(f"unknown export format {format!r}")


def episode_to_dict(ep: Episode) -> dict:
    return {
        "episode_id": ep.episode_id,
        "start": format_timestamp(ep.start),
        "end": format_timestamp(ep.end),
        "activity": ep.activity,
        "notes": ep.notes,
        "affect": dict(sorted(ep.affect.items())),
        "created_at": format_timestamp(ep.created_at),
    }


def episode_from_dict(d: dict) -> Episode:
    return Episode(
        episode_id=d["episode_id"],
        start=parse_timestamp(d["start"]),
        end=parse_timestamp(d["end"]),
        activity=d["activity"],
        notes=d["notes"],
        affect={k: int(v) for k, v in d["affect"].items()},
        created_at=parse_timestamp(d["created_at"]),
    )
