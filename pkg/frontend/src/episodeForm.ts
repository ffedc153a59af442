import { hhmm } from "./time";
import { EpisodeDoc, GapSummaryDoc, SessionDoc } from "./types";

export type EpisodeDraft = {
  start: string;
  end: string;
  activity: string;
  notes: string;
  affect: Record<string, number>;
};

export type FormHandlers = {
  onAppend: (draft: EpisodeDraft) => void;
  onFinalize: () => void;
};

const RATING_SCALES = ["valence", "arousal"];

/**
 * Chronological entry form. The start field always pre-fills with the end
 * of the newest episode so the nudge toward ordered reconstruction is
 * built into the flow, not just enforced server-side.
 */
export class EpisodeForm {
  private start: HTMLInputElement;
  private end: HTMLInputElement;
  private activity: HTMLInputElement;
  private notes: HTMLInputElement;
  private scales = new Map<string, HTMLSelectElement>();
  private addButton: HTMLButtonElement;
  private finalizeButton: HTMLButtonElement;
  private violation: HTMLElement;
  private gapBox: HTMLElement;
  private list: HTMLElement;

  constructor(private root: HTMLElement, handlers: FormHandlers) {
    this.list = document.createElement("div");
    this.list.className = "episode-list";
    root.appendChild(this.list);

    this.start = this.textField("start");
    this.end = this.textField("end");
    this.activity = this.textField("activity");
    this.notes = this.textField("notes");

    for (const name of RATING_SCALES) {
      const label = document.createElement("label");
      label.textContent = name + " (1-7)";
      const select = document.createElement("select");
      select.name = name;
      select.appendChild(new Option("-", ""));
      for (let v = 1; v <= 7; v++) select.appendChild(new Option(String(v), String(v)));
      label.appendChild(select);
      root.appendChild(label);
      this.scales.set(name, select);
    }

    this.addButton = document.createElement("button");
    this.addButton.textContent = "add episode";
    this.addButton.addEventListener("click", () => handlers.onAppend(this.draft()));
    root.appendChild(this.addButton);

    this.finalizeButton = document.createElement("button");
    this.finalizeButton.textContent = "finalize day";
    this.finalizeButton.addEventListener("click", () => handlers.onFinalize());
    root.appendChild(this.finalizeButton);

    this.violation = document.createElement("div");
    this.violation.className = "violation";
    root.appendChild(this.violation);

    this.gapBox = document.createElement("div");
    this.gapBox.className = "gap-summary";
    this.gapBox.style.display = "none";
    root.appendChild(this.gapBox);
  }

  private textField(name: string): HTMLInputElement {
    const label = document.createElement("label");
    label.textContent = name;
    const input = document.createElement("input");
    input.name = name;
    label.appendChild(input);
    this.root.appendChild(label);
    return input;
  }

  private draft(): EpisodeDraft {
    const affect: Record<string, number> = {};
    for (const [name, select] of this.scales) {
      if (select.value !== "") affect[name] = Number(select.value);
    }
    return {
      start: this.start.value,
      end: this.end.value,
      activity: this.activity.value,
      notes: this.notes.value,
      affect,
    };
  }

  /** Refresh from the authoritative session document. */
  setSession(session: SessionDoc, dayStartIso: string): void {
    const episodes = session.episodes;
    const last = episodes[episodes.length - 1];
    this.start.value = last ? last.end : dayStartIso;
    this.end.value = "";
    this.activity.value = "";
    this.notes.value = "";
    for (const select of this.scales.values()) select.value = "";
    this.violation.textContent = "";

    this.list.textContent = "";
    for (const ep of episodes) this.list.appendChild(this.episodeLine(ep));

    const closed = session.state !== "open";
    this.addButton.disabled = closed;
    this.finalizeButton.disabled = closed;
    this.start.disabled = closed;
    this.end.disabled = closed;
  }

  private episodeLine(ep: EpisodeDoc): HTMLElement {
    const line = document.createElement("div");
    line.className = "episode";
    const ratings = Object.entries(ep.affect)
      .map(([k, v]) => `${k} ${v}`)
      .join(", ");
    line.textContent =
      `${ep.episode_id}  ${hhmm(ep.start)}-${hhmm(ep.end)}  ${ep.activity}` +
      (ratings ? `  [${ratings}]` : "");
    return line;
  }

  showViolation(message: string): void {
    this.violation.textContent = message;
  }

  showGaps(summary: GapSummaryDoc): void {
    this.gapBox.style.display = "";
    this.gapBox.textContent = "";
    const head = document.createElement("div");
    const minutes = Math.round(summary.total_uncovered_s / 60);
    head.textContent = `day finalized: ${summary.count} uncovered gap(s), ${minutes} min total`;
    this.gapBox.appendChild(head);
    for (const gap of summary.gaps) {
      const line = document.createElement("div");
      line.textContent = `  ${hhmm(gap.start)} to ${hhmm(gap.end)}`;
      this.gapBox.appendChild(line);
    }
  }
}
