import { Api, WindowRequester } from "./api";
import { DataPane } from "./dataPane";
import { EpisodeForm } from "./episodeForm";
import { Playback, Speed, SPEEDS } from "./playback";
import { TimelineView } from "./timeline";
import { SessionDoc, WindowDoc } from "./types";

export class App {
  private api: Api;
  private timeline: TimelineView;
  private dataPane: DataPane;
  private playback: Playback;
  private form: EpisodeForm;
  private requester: WindowRequester;
  private playButton!: HTMLButtonElement;
  private speedButtons = new Map<Speed, HTMLButtonElement>();

  private day = "";
  private dayStartIso = "";
  private sessionId: string | null = null;

  constructor(private root: HTMLElement, api: Api) {
    this.api = api;

    const dataPaneHost = this.section("data-pane");
    const controls = this.section("controls");
    const timelineHost = this.section("timeline-pane");
    const episodeHost = this.section("episode-pane");

    this.dataPane = new DataPane(dataPaneHost);
    this.playback = new Playback((frame, index) => this.dataPane.showFrame(frame, index));
    this.buildControls(controls);

    this.timeline = new TimelineView(timelineHost, (from, to) => {
      this.requester.request(this.day, from, to);
    });
    this.requester = new WindowRequester(
      this.api,
      (data) => this.applyWindow(data),
      (message) => this.banner(message),
    );

    this.form = new EpisodeForm(episodeHost, {
      onAppend: (draft) => this.append(draft),
      onFinalize: () => this.finalize(),
    });
  }

  private section(className: string): HTMLElement {
    const el = document.createElement("div");
    el.className = className;
    this.root.appendChild(el);
    return el;
  }

  private buildControls(host: HTMLElement): void {
    for (const speed of SPEEDS) {
      const b = document.createElement("button");
      b.textContent = speed > 0 ? `${speed}×` : `${speed}×`;
      b.addEventListener("click", () => {
        this.playback.setSpeed(speed);
        this.markSpeed();
      });
      this.speedButtons.set(speed, b);
      host.appendChild(b);
      if (speed === -1) {
        this.playButton = document.createElement("button");
        this.playButton.textContent = "play";
        this.playButton.addEventListener("click", () => this.togglePlay());
        host.appendChild(this.playButton);
      }
    }
    this.markSpeed();
  }

  private markSpeed(): void {
    for (const [speed, b] of this.speedButtons) {
      b.style.fontWeight = speed === this.playback.speed ? "bold" : "normal";
    }
  }

  private togglePlay(): void {
    if (this.playback.playing) {
      this.playback.pause();
      this.playButton.textContent = "play";
    } else {
      this.playback.play();
      this.playButton.textContent = "pause";
    }
  }

  async start(): Promise<void> {
    const days = await this.api.days();
    if (days.length === 0) {
      this.banner("no days ingested yet");
      return;
    }
    await this.openDay(days[days.length - 1]);
  }

  async openDay(day: string): Promise<void> {
    this.day = day;
    const doc = await this.api.timeline(day);
    this.timeline.render(doc);
    this.dayStartIso = doc.start;
    this.requester.request(day, doc.start, doc.end);

    const sessions = await this.api.sessions(day);
    this.sessionId = sessions.length
      ? sessions[sessions.length - 1]
      : await this.api.createSession(day);
    this.form.setSession(await this.api.session(day, this.sessionId), this.dayStartIso);
  }

  private applyWindow(data: WindowDoc): void {
    this.timeline.setSelection(data.start, data.end);
    this.dataPane.render(data);
    this.playback.load(data.frames);
    this.playButton.disabled = data.frames.length === 0;
    this.playButton.textContent = "play";
  }

  private async append(draft: {
    start: string;
    end: string;
    activity: string;
    notes: string;
    affect: Record<string, number>;
  }): Promise<void> {
    if (!this.sessionId) return;
    const result = await this.api.appendEpisode(this.day, this.sessionId, draft);
    if (result.ok) {
      this.form.setSession(result.body as SessionDoc, this.dayStartIso);
    } else {
      this.form.showViolation(result.detail);
    }
  }

  private async finalize(): Promise<void> {
    if (!this.sessionId) return;
    const result = await this.api.finalize(this.day, this.sessionId);
    if (result.ok) {
      this.form.showGaps(result.body);
      this.form.setSession(await this.api.session(this.day, this.sessionId), this.dayStartIso);
    } else {
      this.form.showViolation(result.detail);
    }
  }

  private banner(message: string): void {
    const el = document.createElement("div");
    el.className = "banner";
    el.textContent = message;
    this.root.prepend(el);
  }
}
