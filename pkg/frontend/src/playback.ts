import { FrameDoc } from "./types";

export const SPEEDS = [-4, -2, -1, 1, 2, 4] as const;
export type Speed = (typeof SPEEDS)[number];

/**
 * Cursor over the window's frame sequence. Each frame holds for
 * suggested_display_ms / |speed|; negative speeds walk backwards.
 * The cursor clamps at either end and pauses itself there.
 */
export class Playback {
  private frames: FrameDoc[] = [];
  private index = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  playing = false;
  speed: Speed = 1;

  constructor(private onFrame: (frame: FrameDoc | null, index: number) => void) {}

  load(frames: FrameDoc[]): void {
    this.pause();
    this.frames = frames;
    this.index = 0;
    this.emit();
  }

  get cursor(): number {
    return this.index;
  }

  get frameCount(): number {
    return this.frames.length;
  }

  setSpeed(speed: Speed): void {
    if (!SPEEDS.includes(speed)) throw new Error("unsupported speed: " + speed);
    this.speed = speed;
    if (this.playing) {
      this.cancelTimer();
      this.scheduleStep();
    }
  }

  play(): void {
    if (this.playing || this.frames.length === 0) return;
    if (this.atEnd()) return; // nothing left in this direction
    this.playing = true;
    this.scheduleStep();
  }

  pause(): void {
    this.playing = false;
    this.cancelTimer();
  }

  seek(index: number): void {
    if (this.frames.length === 0) return;
    this.index = Math.min(this.frames.length - 1, Math.max(0, index));
    this.emit();
  }

  private atEnd(): boolean {
    return this.speed > 0
      ? this.index >= this.frames.length - 1
      : this.index <= 0;
  }

  private scheduleStep(): void {
    const dwell = this.frames[this.index].suggested_display_ms / Math.abs(this.speed);
    this.timer = setTimeout(() => this.step(), dwell);
  }

  private step(): void {
    if (!this.playing) return;
    this.index += this.speed > 0 ? 1 : -1;
    this.emit();
    if (this.atEnd()) {
      this.pause();
    } else {
      this.scheduleStep();
    }
  }

  private cancelTimer(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private emit(): void {
    this.onFrame(this.frames[this.index] ?? null, this.index);
  }
}
