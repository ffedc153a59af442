import {
  DaySummaryDoc,
  GapSummaryDoc,
  SessionDoc,
  TimelineDoc,
  WindowDoc,
} from "./types";

export type ApiResult<T> = { ok: true; body: T } | { ok: false; status: number; detail: string };

async function asResult<T>(res: Response): Promise<ApiResult<T>> {
  if (res.ok) return { ok: true, body: (await res.json()) as T };
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-json error body; statusText is all we have
  }
  return { ok: false, status: res.status, detail };
}

export class Api {
  constructor(private base = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async days(): Promise<string[]> {
    const res = await fetch(this.url("/api/days"));
    if (!res.ok) throw new Error("day list unavailable: " + res.status);
    return ((await res.json()) as { days: string[] }).days;
  }

  async daySummary(day: string): Promise<DaySummaryDoc> {
    const res = await fetch(this.url(`/api/days/${day}`));
    if (!res.ok) throw new Error("day summary unavailable: " + res.status);
    return (await res.json()) as DaySummaryDoc;
  }

  async timeline(day: string): Promise<TimelineDoc> {
    const res = await fetch(this.url(`/api/days/${day}/timeline`));
    if (!res.ok) throw new Error("timeline unavailable: " + res.status);
    return (await res.json()) as TimelineDoc;
  }

  async window(day: string, fromIso: string, toIso: string): Promise<WindowDoc> {
    const params = new URLSearchParams({ from: fromIso, to: toIso });
    const res = await fetch(this.url(`/api/days/${day}/window?${params}`));
    if (!res.ok) throw new Error("window unavailable: " + res.status);
    return (await res.json()) as WindowDoc;
  }

  async sessions(day: string): Promise<string[]> {
    const res = await fetch(this.url(`/api/days/${day}/sessions`));
    if (!res.ok) throw new Error("session list unavailable: " + res.status);
    return ((await res.json()) as { sessions: string[] }).sessions;
  }

  async createSession(day: string): Promise<string> {
    const res = await fetch(this.url(`/api/days/${day}/sessions`), { method: "POST" });
    if (!res.ok) throw new Error("cannot open session: " + res.status);
    return ((await res.json()) as { session_id: string }).session_id;
  }

  async session(day: string, sid: string): Promise<SessionDoc> {
    const res = await fetch(this.url(`/api/days/${day}/sessions/${sid}`));
    if (!res.ok) throw new Error("session unavailable: " + res.status);
    return (await res.json()) as SessionDoc;
  }

  async appendEpisode(
    day: string,
    sid: string,
    episode: { start: string; end: string; activity: string; notes?: string; affect?: Record<string, number> },
  ): Promise<ApiResult<SessionDoc>> {
    const res = await fetch(this.url(`/api/days/${day}/sessions/${sid}/episodes`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(episode),
    });
    return asResult<SessionDoc>(res);
  }

  async finalize(day: string, sid: string): Promise<ApiResult<GapSummaryDoc>> {
    const res = await fetch(this.url(`/api/days/${day}/sessions/${sid}/finalize`), {
      method: "POST",
    });
    return asResult<GapSummaryDoc>(res);
  }
}

/**
 * Serializes window fetches: at most one request in flight, the newest
 * selection replaces any queued one, and responses that are no longer the
 * newest are dropped by sequence number.
 */
export class WindowRequester {
  private seq = 0;
  private inFlight = false;
  private pending: { day: string; from: string; to: string } | null = null;

  constructor(
    private api: Api,
    private apply: (data: WindowDoc) => void,
    private onError: (message: string) => void = () => {},
  ) {}

  request(day: string, fromIso: string, toIso: string): void {
    if (this.inFlight) {
      this.pending = { day, from: fromIso, to: toIso };
      return;
    }
    this.issue(day, fromIso, toIso);
  }

  private issue(day: string, fromIso: string, toIso: string): void {
    const ticket = ++this.seq;
    this.inFlight = true;
    this.api.window(day, fromIso, toIso).then(
      (data) => this.settle(ticket, () => this.apply(data)),
      (err) => this.settle(ticket, () => this.onError(String(err))),
    );
  }

  private settle(ticket: number, deliver: () => void): void {
    this.inFlight = false;
    if (this.pending) {
      const next = this.pending;
      this.pending = null;
      this.issue(next.day, next.from, next.to);
      return; // a newer selection exists; this response is stale
    }
    if (ticket === this.seq) deliver();
  }
}
