"""Significant-location analysis: stay points, transitions, places, circle sizing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

from .model import CoverageInterval, GpsFix, seconds_between

EARTH_RADIUS_M = 6_371_000.0


class GeoError(Exception):
    pass


class UnsortedInput(GeoError):
    pass


class InvalidRange(GeoError):
    pass


@dataclass(frozen=True, slots=True)
class GeoParams:
    """Thresholds for dwell detection and place merging.

    A significant location is somewhere the wearer spent more than
    ``min_dwell_s`` seconds inside a ``radius_m``-meter radius. The defaults
    are the review tool's standing configuration; both are overridable.
    """

    radius_m: float = 50.0
    min_dwell_s: float = 300.0
    earth_radius_m: float = EARTH_RADIUS_M
    merge_radius_m: float = 50.0

    def __post_init__(self):
        for name in ("radius_m", "min_dwell_s", "earth_radius_m", "merge_radius_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def haversine_m(
    lat1: float, lon1: float, lat2: float, lon2: float,
    earth_radius_m: float = EARTH_RADIUS_M,
) -> float:
    """Great-circle distance in meters between two lat/lon points, spherical earth."""
    phi1, lam1, phi2, lam2 = map(math.radians, (lat1, lon1, lat2, lon2))
    a = (
        math.sin((phi2 - phi1) / 2.0) ** 2
        + math.cos(phi1) * math.cos(phi2) * math.sin((lam2 - lam1) / 2.0) ** 2
    )
    return 2.0 * earth_radius_m * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True, slots=True)
class StayPoint:
    """A dwell episode: consecutive fixes that stayed near one spot long enough.

    ``member_range`` is the inclusive [i, j] index span into the day's fix
    list; every member lies within the detection radius of the anchor fix
    (the fix at index i).
    """

    centroid_lat: float
    centroid_lon: float
    arrival: datetime
    departure: datetime
    member_range: tuple[int, int]

    @property
    def dwell_s(self) -> float:
        return seconds_between(self.arrival, self.departure)


@dataclass(frozen=True, slots=True)
class Transition:
    """Movement interval between dwells (or between a coverage edge and a dwell).

    ``from_place``/``to_place`` index the bounding stay points in the day's
    stay-point list; None at a coverage edge.
    """

    start: datetime
    end: datetime
    from_place: int | None
    to_place: int | None


@dataclass(frozen=True, slots=True)
class Place:
    """One significant location, possibly visited several times."""

    centroid_lat: float
    centroid_lon: float
    total_dwell_s: float
    visits: tuple[int, ...]  # indexes into the stay-point list


@dataclass(frozen=True, slots=True)
class DayAnalysis:
    stay_points: tuple[StayPoint, ...]
    transitions: tuple[Transition, ...]
    places: tuple[Place, ...]


def detect_stay_points(fixes: list[GpsFix], params: GeoParams) -> list[StayPoint]:
    """Anchor-sweep dwell detection.

    From anchor i, extend j while fixes stay within ``radius_m`` of the anchor;
    the candidate [i, j-1] becomes a stay point when its time span strictly
    exceeds ``min_dwell_s`` (strictly: a dwell of exactly the threshold does
    not count). After emitting, the sweep resumes at the first out-of-radius
    fix; otherwise the anchor advances by one.
    """
    n = len(fixes)
    for m in range(1, n):
        if fixes[m].t <= fixes[m - 1].t:
            raise UnsortedInput(f"fixes[{m}] not after fixes[{m - 1}]")

    out: list[StayPoint] = []
    i = 0
    while i < n:
        anchor = fixes[i]
        j = i + 1
        while j < n and haversine_m(
            anchor.lat, anchor.lon, fixes[j].lat, fixes[j].lon, params.earth_radius_m
        ) <= params.radius_m:
            j += 1
        k = j - 1
        if seconds_between(anchor.t, fixes[k].t) > params.min_dwell_s:
            members = fixes[i : k + 1]
            out.append(
                StayPoint(
                    centroid_lat=sum(f.lat for f in members) / len(members),
                    centroid_lon=sum(f.lon for f in members) / len(members),
                    arrival=anchor.t,
                    departure=fixes[k].t,
                    member_range=(i, k),
                )
            )
            i = j
        else:
            i += 1
    return out


def derive_transitions(
    fixes: list[GpsFix],
    stay_points: list[StayPoint],
    coverage: list[CoverageInterval],
) -> list[Transition]:
    """Movement intervals: covered time between dwells that actually has fixes.

    Each maximal covered interval left over once stay-point spans are removed
    becomes a transition iff at least one non-member fix falls inside it.
    Covered-but-fixless time and uncovered time are both plain data absence.
    """
    covered = [(c.start, c.end) for c in coverage]
    # subtract stay spans from the covered region
    gaps: list[tuple] = []
    for start, end in covered:
        cursor = start
        for sp in stay_points:
            if sp.departure <= cursor or sp.arrival >= end:
                continue
            if sp.arrival > cursor:
                gaps.append((cursor, sp.arrival))
            cursor = max(cursor, sp.departure)
        if cursor < end:
            gaps.append((cursor, end))

    member = set()
    for sp in stay_points:
        member.update(range(sp.member_range[0], sp.member_range[1] + 1))

    def bounding(start, end):
        from_idx = to_idx = None
        for idx, sp in enumerate(stay_points):
            if sp.departure == start:
                from_idx = idx
            if sp.arrival == end:
                to_idx = idx
        return from_idx, to_idx

    out: list[Transition] = []
    for start, end in gaps:
        has_fix = any(
            start <= f.t <= end and idx not in member for idx, f in enumerate(fixes)
        )
        if has_fix:
            from_idx, to_idx = bounding(start, end)
            out.append(Transition(start, end, from_idx, to_idx))
    return out


def merge_places(stay_points: list[StayPoint], params: GeoParams) -> list[Place]:
    """Cluster stay points into places by single linkage on centroid distance.

    The place centroid is the dwell-weighted mean of member centroids; output
    is ordered by total dwell descending, ties broken by earliest arrival.
    """
    n = len(stay_points)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(n):
        for b in range(a + 1, n):
            d = haversine_m(
                stay_points[a].centroid_lat,
                stay_points[a].centroid_lon,
                stay_points[b].centroid_lat,
                stay_points[b].centroid_lon,
                params.earth_radius_m,
            )
            if d <= params.merge_radius_m:
                parent[find(a)] = find(b)

    clusters: dict[int, list[int]] = {}
    for idx in range(n):
        clusters.setdefault(find(idx), []).append(idx)

    places = []
    for members in clusters.values():
        dwells = [stay_points[m].dwell_s for m in members]
        total = sum(dwells)
        lat = sum(stay_points[m].centroid_lat * w for m, w in zip(members, dwells)) / total
        lon = sum(stay_points[m].centroid_lon * w for m, w in zip(members, dwells)) / total
        places.append(Place(lat, lon, total, tuple(members)))

    places.sort(key=lambda p: (-p.total_dwell_s, min(stay_points[m].arrival for m in p.visits)))
    return places


def analyze_day(fixes, location_coverage, params: GeoParams) -> DayAnalysis:
    stay_points = detect_stay_points(list(fixes), params)
    transitions = derive_transitions(list(fixes), stay_points, list(location_coverage))
    places = merge_places(stay_points, params)
    return DayAnalysis(tuple(stay_points), tuple(transitions), tuple(places))


def circle_radius_px(
    dwell_s: float, max_dwell_s: float, r_min_px: float, r_max_px: float
) -> float:
    """Map dwell time to a marker radius; area grows linearly in dwell at r_min 0."""
    if not (0 < dwell_s <= max_dwell_s):
        raise InvalidRange(f"dwell_s must be in (0, {max_dwell_s}], got {dwell_s}")
    if not (0 <= r_min_px < r_max_px):
        raise InvalidRange("need 0 <= r_min_px < r_max_px")
    return r_min_px + (r_max_px - r_min_px) * math.sqrt(dwell_s / max_dwell_s)
