import { paintMarker, paintSegment } from "./styles";
import { iso, ms, snapMinute } from "./time";
import { TimelineDoc, TrackDoc, TRACK_ORDER } from "./types";

export type WindowHandler = (fromIso: string, toIso: string) => void;

/** px distance within which a drag grabs an existing selection edge */
const EDGE_GRAB_PX = 6;

export class TimelineView {
  private lanes: HTMLElement | null = null;
  private brush: HTMLElement | null = null;
  private dayStart = 0;
  private dayEnd = 0;
  private selStart = 0;
  private selEnd = 0;
  private drag: { mode: "new" | "left" | "right"; anchor: number } | null = null;

  constructor(private root: HTMLElement, private onWindow: WindowHandler) {
    this.onMouseMove = this.onMouseMove.bind(this);
    this.onMouseUp = this.onMouseUp.bind(this);
  }

  render(doc: TimelineDoc): void {
    this.root.textContent = "";
    if (!this.isWellFormed(doc)) {
      const banner = document.createElement("div");
      banner.className = "banner";
      banner.textContent = "timeline document is malformed; try re-ingesting the day";
      this.root.appendChild(banner);
      this.lanes = null;
      return;
    }

    this.dayStart = ms(doc.start);
    this.dayEnd = ms(doc.end);
    this.selStart = this.dayStart;
    this.selEnd = this.dayEnd;

    const lanes = document.createElement("div");
    lanes.className = "lanes";
    for (const name of TRACK_ORDER) {
      const lane = document.createElement("div");
      lane.className = "lane";
      const label = document.createElement("div");
      label.className = "label";
      label.textContent = name;
      const track = this.buildTrack(doc[name], name);
      lane.appendChild(label);
      lane.appendChild(track);
      lanes.appendChild(lane);
    }

    this.brush = document.createElement("div");
    this.brush.className = "brush";
    lanes.appendChild(this.brush);

    lanes.addEventListener("mousedown", (e) => this.onMouseDown(e));
    this.root.appendChild(lanes);
    this.lanes = lanes;
    this.positionBrush();
  }

  private isWellFormed(doc: TimelineDoc): boolean {
    if (!doc || typeof doc.start !== "string" || typeof doc.end !== "string") return false;
    if (!(ms(doc.start) < ms(doc.end))) return false;
    return TRACK_ORDER.every(
      (name) => doc[name] && Array.isArray(doc[name].segments),
    );
  }

  private buildTrack(track: TrackDoc, name: string): HTMLElement {
    const el = document.createElement("div");
    el.className = "track track-" + name;
    for (const seg of track.segments) {
      const div = document.createElement("div");
      div.className = "seg";
      div.dataset.kind = seg.kind;
      div.style.left = this.pct(ms(seg.start));
      div.style.width = this.widthPct(ms(seg.start), ms(seg.end));
      paintSegment(div, seg.kind);
      el.appendChild(div);
    }
    for (const marker of track.markers ?? []) {
      const div = document.createElement("div");
      div.className = "marker marker-" + marker.direction;
      div.dataset.direction = marker.direction;
      div.style.left = this.pct(ms(marker.t));
      paintMarker(div, marker.direction);
      el.appendChild(div);
    }
    return el;
  }

  private pct(t: number): string {
    return (((t - this.dayStart) / (this.dayEnd - this.dayStart)) * 100) + "%";
  }

  private widthPct(a: number, b: number): string {
    return (((b - a) / (this.dayEnd - this.dayStart)) * 100) + "%";
  }

  setSelection(fromIso: string, toIso: string): void {
    this.selStart = ms(fromIso);
    this.selEnd = ms(toIso);
    this.positionBrush();
  }

  get selection(): { from: string; to: string } {
    return { from: iso(this.selStart), to: iso(this.selEnd) };
  }

  private positionBrush(): void {
    if (!this.brush) return;
    this.brush.style.left = this.pct(this.selStart);
    this.brush.style.width = this.widthPct(this.selStart, this.selEnd);
  }

  // --- brushing ---------------------------------------------------------

  private timeAt(clientX: number): number {
    const rect = this.lanes!.getBoundingClientRect();
    const frac = Math.min(1, Math.max(0, (clientX - rect.left) / rect.width));
    return snapMinute(this.dayStart + frac * (this.dayEnd - this.dayStart));
  }

  private xOf(t: number): number {
    const rect = this.lanes!.getBoundingClientRect();
    return rect.left + ((t - this.dayStart) / (this.dayEnd - this.dayStart)) * rect.width;
  }

  private onMouseDown(e: MouseEvent): void {
    if (!this.lanes) return;
    e.preventDefault();
    const nearLeft = Math.abs(e.clientX - this.xOf(this.selStart)) <= EDGE_GRAB_PX;
    const nearRight = Math.abs(e.clientX - this.xOf(this.selEnd)) <= EDGE_GRAB_PX;
    if (nearLeft || nearRight) {
      // when the selection is collapsed both edges coincide; prefer the right
      this.drag = { mode: nearRight ? "right" : "left", anchor: 0 };
    } else {
      const t = this.timeAt(e.clientX);
      this.drag = { mode: "new", anchor: t };
      this.selStart = t;
      this.selEnd = t;
    }
    document.addEventListener("mousemove", this.onMouseMove);
    document.addEventListener("mouseup", this.onMouseUp);
    this.positionBrush();
  }

  private onMouseMove(e: MouseEvent): void {
    if (!this.drag) return;
    const t = this.timeAt(e.clientX);
    if (this.drag.mode === "new") {
      this.selStart = Math.min(this.drag.anchor, t);
      this.selEnd = Math.max(this.drag.anchor, t);
    } else if (this.drag.mode === "left") {
      this.selStart = Math.min(t, this.selEnd - 60000);
    } else {
      this.selEnd = Math.max(t, this.selStart + 60000);
    }
    this.positionBrush();
  }

  private onMouseUp(): void {
    document.removeEventListener("mousemove", this.onMouseMove);
    document.removeEventListener("mouseup", this.onMouseUp);
    if (!this.drag) return;
    this.drag = null;
    if (this.selEnd > this.selStart) {
      this.onWindow(iso(this.selStart), iso(this.selEnd));
    }
  }
}
