// Wire types for the service responses.

export type SegmentDoc = {
  start: string;
  end: string;
  kind: string;
  meta: Record<string, unknown>;
};

export type MarkerDoc = { t: string; direction: string };

export type TrackDoc = { segments: SegmentDoc[]; markers?: MarkerDoc[] };

export type TimelineDoc = {
  date: string;
  start: string;
  end: string;
  visual: TrackDoc;
  location: TrackDoc;
  call: TrackDoc;
  sms: TrackDoc;
};

export type PlaceDoc = {
  place_index: number;
  centroid_lat: number;
  centroid_lon: number;
  dwell_s: number;
  circle_radius_px: number;
};

export type FrameDoc = {
  media_id: string;
  t: string;
  suggested_display_ms: number;
  media_url: string;
};

export type FixDoc = { t: string; lat: number; lon: number };

export type EventDoc = {
  t: string;
  channel: string;
  direction: string;
  duration_s: number;
};

export type WindowDoc = {
  date: string;
  start: string;
  end: string;
  frames: FrameDoc[];
  fixes: FixDoc[];
  places: PlaceDoc[];
  events: EventDoc[];
};

export type EpisodeDoc = {
  episode_id: string;
  start: string;
  end: string;
  activity: string;
  notes: string;
  affect: Record<string, number>;
  created_at: string;
};

export type SessionDoc = {
  session_id: string;
  date: string;
  state: string;
  episodes: EpisodeDoc[];
};

export type GapSummaryDoc = {
  count: number;
  total_uncovered_s: number;
  gaps: { start: string; end: string }[];
};

export type DaySummaryDoc = {
  date: string;
  start: string;
  end: string;
  tz_offset_minutes: number;
  counts: Record<string, number>;
};

export const TRACK_ORDER = ["visual", "location", "call", "sms"] as const;
export type TrackName = (typeof TRACK_ORDER)[number];
