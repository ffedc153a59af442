import { FrameDoc, SegmentDoc, TimelineDoc, WindowDoc } from "../src/types";

export const DAY_START = "2013-05-01T00:00:00Z";
export const DAY_END = "2013-05-02T00:00:00Z";

export function at(hour: number, minute = 0): string {
  const h = String(hour).padStart(2, "0");
  const m = String(minute).padStart(2, "0");
  return `2013-05-01T${h}:${m}:00Z`;
}

export function seg(start: string, end: string, kind: string): SegmentDoc {
  return { start, end, kind, meta: {} };
}

/** A believable small day: two camera runs, three locations, one call. */
export function sampleTimeline(): TimelineDoc {
  return {
    date: "2013-05-01",
    start: DAY_START,
    end: DAY_END,
    visual: {
      segments: [
        seg(DAY_START, at(9, 30), "absent"),
        seg(at(9, 30), at(9, 40), "present"),
        seg(at(9, 40), at(13), "absent"),
        seg(at(13), at(13, 10), "present"),
        seg(at(13, 10), DAY_END, "absent"),
      ],
    },
    location: {
      segments: [
        seg(DAY_START, at(8), "absent"),
        seg(at(8), at(8, 50), "stationary"),
        seg(at(8, 50), at(9), "transition"),
        seg(at(9), at(12), "stationary"),
        seg(at(12), DAY_END, "absent"),
      ],
    },
    call: {
      segments: [
        seg(DAY_START, at(14), "absent"),
        seg(at(14), at(14, 2), "call"),
        seg(at(14, 2), at(15), "covered-idle"),
        seg(at(15), DAY_END, "absent"),
      ],
    },
    sms: {
      segments: [
        seg(DAY_START, at(10), "absent"),
        seg(at(10), at(17), "covered"),
        seg(at(17), DAY_END, "absent"),
      ],
      markers: [
        { t: at(10, 5), direction: "incoming" },
        { t: at(16, 30), direction: "outgoing" },
      ],
    },
  };
}

export function emptyTimeline(): TimelineDoc {
  const wholeDay = [seg(DAY_START, DAY_END, "absent")];
  return {
    date: "2013-05-01",
    start: DAY_START,
    end: DAY_END,
    visual: { segments: [...wholeDay] },
    location: { segments: [...wholeDay] },
    call: { segments: [...wholeDay] },
    sms: { segments: [...wholeDay], markers: [] },
  };
}

export function frame(hour: number, minute: number, n: number, displayMs = 500): FrameDoc {
  const id = `2013-05-01#${String(n).padStart(6, "0")}`;
  return {
    media_id: id,
    t: at(hour, minute),
    suggested_display_ms: displayMs,
    media_url: `/api/media/2013-05-01/${encodeURIComponent(id)}`,
  };
}

export function sampleWindow(): WindowDoc {
  return {
    date: "2013-05-01",
    start: at(8),
    end: at(14),
    frames: [frame(9, 30, 0), frame(9, 31, 1), frame(9, 32, 2)],
    fixes: [
      { t: at(8), lat: 32.65, lon: -16.9167 },
      { t: at(9), lat: 32.66, lon: -16.91 },
      { t: at(12, 10), lat: 32.67, lon: -16.903 },
    ],
    places: [
      { place_index: 0, centroid_lat: 32.66, centroid_lon: -16.91, dwell_s: 10800, circle_radius_px: 40 },
      { place_index: 1, centroid_lat: 32.67, centroid_lon: -16.903, dwell_s: 4800, circle_radius_px: 33.76 },
      { place_index: 2, centroid_lat: 32.65, centroid_lon: -16.9167, dwell_s: 3000, circle_radius_px: 12.5 },
    ],
    events: [{ t: at(10, 5), channel: "sms", direction: "incoming", duration_s: 0 }],
  };
}
