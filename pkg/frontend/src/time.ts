// Instant helpers; the service speaks ISO-8601 with a trailing Z.

export function ms(iso: string): number {
  return Date.parse(iso);
}

export function iso(t: number): string {
  // the service truncates to ms anyway; strip the fraction when zero
  return new Date(t).toISOString().replace(".000Z", "Z");
}

export function hhmm(isoString: string): string {
  return isoString.slice(11, 16);
}

/** Snap an instant to a whole minute so dragged bounds stay readable. */
export function snapMinute(t: number): number {
  return Math.round(t / 60000) * 60000;
}
