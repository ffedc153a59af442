import { hhmm } from "./time";
import { FrameDoc, WindowDoc } from "./types";

/**
 * Top half of the screen: image viewer on the left, place map on the right.
 * The map is a plain projection of the window's bounding box; circle sizes
 * come from the service untouched.
 */
export class DataPane {
  private viewer: HTMLElement;
  private img: HTMLImageElement;
  private caption: HTMLElement;
  private map: HTMLElement;
  private frameTotal = 0;

  constructor(root: HTMLElement) {
    this.viewer = document.createElement("div");
    this.viewer.className = "viewer";
    this.img = document.createElement("img");
    this.img.alt = "lifelog frame";
    this.caption = document.createElement("div");
    this.caption.className = "caption";
    this.viewer.appendChild(this.img);
    this.viewer.appendChild(this.caption);

    this.map = document.createElement("div");
    this.map.className = "map";

    root.appendChild(this.viewer);
    root.appendChild(this.map);
  }

  render(data: WindowDoc): void {
    this.frameTotal = data.frames.length;
    if (data.frames.length === 0) {
      this.img.removeAttribute("src");
      this.img.style.display = "none";
      this.caption.className = "placeholder";
      this.caption.textContent = "no images in this window";
    } else {
      this.img.style.display = "";
      this.caption.className = "caption";
    }
    this.renderMap(data);
  }

  showFrame(frame: FrameDoc | null, index: number): void {
    if (!frame) return;
    this.img.src = frame.media_url;
    this.caption.textContent = `${hhmm(frame.t)}  (${index + 1}/${this.frameTotal})`;
  }

  private renderMap(data: WindowDoc): void {
    this.map.textContent = "";
    const points = data.fixes
      .map((f) => ({ lat: f.lat, lon: f.lon }))
      .concat(data.places.map((p) => ({ lat: p.centroid_lat, lon: p.centroid_lon })));
    if (points.length === 0) return;

    let minLat = Infinity, maxLat = -Infinity, minLon = Infinity, maxLon = -Infinity;
    for (const p of points) {
      minLat = Math.min(minLat, p.lat);
      maxLat = Math.max(maxLat, p.lat);
      minLon = Math.min(minLon, p.lon);
      maxLon = Math.max(maxLon, p.lon);
    }
    // degenerate boxes (single stay) still need a finite scale
    const latSpan = maxLat - minLat || 1e-4;
    const lonSpan = maxLon - minLon || 1e-4;
    const x = (lon: number) => 10 + ((lon - minLon) / lonSpan) * 80;
    const y = (lat: number) => 10 + (1 - (lat - minLat) / latSpan) * 80;

    this.drawTrail(data, x, y);

    // bigger circles go in first so the small ones stay clickable on top
    const bySize = [...data.places].sort(
      (a, b) => b.circle_radius_px - a.circle_radius_px,
    );
    for (const place of bySize) {
      const el = document.createElement("div");
      el.className = "place-circle";
      el.dataset.placeIndex = String(place.place_index);
      el.style.width = place.circle_radius_px * 2 + "px";
      el.style.height = place.circle_radius_px * 2 + "px";
      el.style.left = x(place.centroid_lon) + "%";
      el.style.top = y(place.centroid_lat) + "%";
      el.title = `place ${place.place_index}: ${Math.round(place.dwell_s / 60)} min`;
      this.map.appendChild(el);
    }
  }

  private drawTrail(
    data: WindowDoc,
    x: (lon: number) => number,
    y: (lat: number) => number,
  ): void {
    if (data.fixes.length < 2) return;
    const canvas = document.createElement("canvas");
    canvas.width = 400;
    canvas.height = 400;
    this.map.appendChild(canvas);
    const ctx = canvas.getContext && canvas.getContext("2d");
    if (!ctx) return; // headless test runs have no raster backend
    ctx.strokeStyle = "#999";
    ctx.beginPath();
    data.fixes.forEach((f, i) => {
      const px = (x(f.lon) / 100) * canvas.width;
      const py = (y(f.lat) / 100) * canvas.height;
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
}
