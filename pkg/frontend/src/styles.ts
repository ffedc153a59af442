// Segment kind -> paint table. Every kind the service can emit must appear
// here; anything else gets the warning paint so it can never pass silently.

export type SegmentPaint = {
  /** solid fill color, or the stripe color when dashed */
  color: string;
  /** dashed rendering (the "in transit" pattern) */
  dashed?: boolean;
};

/** data present */
export const GREEN = "green";
/** channel absent / device off */
export const BLUE = "blue";
/** incoming sms marker */
export const RED = "red";
/** device on but idle; deliberately neither green nor blue */
export const IDLE = "#e7ede7";
/** unknown kind: loud on purpose */
export const WARNING = "magenta";

export const SEGMENT_PAINT: Record<string, SegmentPaint> = {
  present: { color: GREEN },
  stationary: { color: GREEN },
  call: { color: GREEN },
  transition: { color: GREEN, dashed: true },
  absent: { color: BLUE },
  covered: { color: IDLE },
  "covered-idle": { color: IDLE },
};

export function paintSegment(el: HTMLElement, kind: string): void {
  const paint = SEGMENT_PAINT[kind];
  if (!paint) {
    el.classList.add("seg-unknown");
    el.style.backgroundColor = WARNING;
    el.textContent = "?";
    el.title = "unknown segment kind: " + kind;
    return;
  }
  if (paint.dashed) {
    el.style.backgroundImage =
      `repeating-linear-gradient(90deg, ${paint.color} 0 8px, transparent 8px 14px)`;
  } else {
    el.style.backgroundColor = paint.color;
  }
}

export function paintMarker(el: HTMLElement, direction: string): void {
  if (direction === "incoming") {
    el.style.backgroundColor = RED;
    el.style.width = "2px";
  } else {
    // outgoing: same hue, hollow, so the two read apart at a glance
    el.style.backgroundColor = "white";
    el.style.border = `1px solid ${RED}`;
    el.style.width = "4px";
  }
}

const SHEET = `
  body { font: 13px/1.4 system-ui, sans-serif; margin: 0; background: #fafafa; }
  #app { display: flex; flex-direction: column; height: 100vh; }
  .data-pane { flex: 1; display: flex; gap: 8px; padding: 8px; min-height: 0; }
  .viewer, .map { flex: 1; position: relative; background: #fff; border: 1px solid #ddd; overflow: hidden; }
  .viewer img { max-width: 100%; max-height: 85%; display: block; margin: 0 auto; }
  .viewer .caption { text-align: center; color: #555; }
  .viewer .placeholder { color: #888; text-align: center; margin-top: 3em; }
  .controls { text-align: center; padding: 4px; }
  .controls button { margin: 0 2px; min-width: 2.2em; }
  .map .place-circle { position: absolute; border-radius: 50%; background: rgba(46, 139, 87, 0.45);
    border: 1px solid green; transform: translate(-50%, -50%); }
  .map canvas { position: absolute; inset: 0; }
  .timeline-pane { padding: 8px; background: #fff; border-top: 1px solid #ccc; }
  .lane { display: flex; align-items: center; margin: 3px 0; }
  .lane .label { width: 64px; color: #444; text-align: right; padding-right: 8px; }
  .lanes { position: relative; flex: 1; }
  .track { position: relative; height: 22px; margin: 2px 0; background: #fff; border: 1px solid #eee; }
  .seg { position: absolute; top: 0; bottom: 0; overflow: hidden; color: #fff;
    font-size: 10px; text-align: center; }
  .seg-unknown { outline: 2px solid black; z-index: 2; }
  .marker { position: absolute; top: -2px; bottom: -2px; z-index: 3; }
  .brush { position: absolute; top: 0; bottom: 0; background: rgba(70, 130, 180, 0.25);
    border-left: 1px solid steelblue; border-right: 1px solid steelblue; pointer-events: none; }
  .banner { background: #b00020; color: #fff; padding: 6px 10px; }
  .episode-pane { display: flex; gap: 8px; align-items: flex-end; padding: 8px;
    background: #f4f4f4; border-top: 1px solid #ccc; flex-wrap: wrap; }
  .episode-pane label { display: flex; flex-direction: column; font-size: 11px; color: #555; }
  .episode-pane input, .episode-pane select { font: inherit; }
  .violation { color: #b00020; width: 100%; }
  .gap-summary { background: #fff; border: 1px solid #ccc; padding: 8px; width: 100%; }
  .episode-list { font-size: 12px; color: #333; width: 100%; }
`;

export function injectStyles(doc: Document = document): void {
  const style = doc.createElement("style");
  style.textContent = SHEET;
  doc.head.appendChild(style);
}
