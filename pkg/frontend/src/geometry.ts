/** Pure geometry and arithmetic shared by the map and the time panel.
 *
 * The UI never recomputes scores or geodesy; these helpers only mirror
 * trivial arithmetic the server also applies (clamping a dragged point
 * into the reachable region, frame-count bookkeeping for display).
 */

import type { RectSpec } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** Nearest point of one rectangle (interior counts) to (x, y). */
export function projectToRect(x: number, y: number, r: RectSpec): Point {
  return {
    x: Math.min(Math.max(x, r.xmin), r.xmax),
    y: Math.min(Math.max(y, r.ymin), r.ymax),
  };
}

/** Nearest reachable point across all rects; inside stays put. */
export function clampToRects(x: number, y: number, rects: RectSpec[]): Point {
  let best: Point | null = null;
  let bestD = Infinity;
  for (const r of rects) {
    const p = projectToRect(x, y, r);
    const d = (p.x - x) ** 2 + (p.y - y) ** 2;
    if (d < bestD) {
      bestD = d;
      best = p;
    }
  }
  if (best === null) {
    throw new Error("no reachable rects");
  }
  return best;
}

export function insideAnyRect(x: number, y: number, rects: RectSpec[]): boolean {
  return rects.some(
    (r) => x >= r.xmin && x <= r.xmax && y >= r.ymin && y <= r.ymax,
  );
}

/** Frame count the server will render: floor(span / interval) + 1. */
export function frameCount(startIso: string, endIso: string, intervalS: number): number {
  const span = (Date.parse(endIso) - Date.parse(startIso)) / 1000;
  if (!(intervalS > 0) || !(span >= 0)) {
    return 0;
  }
  return Math.floor(span / intervalS) + 1;
}

/** Playback duration in seconds of the resulting clip. */
export function outputDurationS(
  startIso: string,
  endIso: string,
  intervalS: number,
  fps: number,
): number {
  const n = frameCount(startIso, endIso, intervalS);
  return n > 0 && fps > 0 ? n / fps : 0;
}

/** Capture time at slider progress u in [0, 1]. */
export function timeAtProgress(startIso: string, endIso: string, u: number): string {
  const a = Date.parse(startIso);
  const b = Date.parse(endIso);
  const clamped = Math.min(Math.max(u, 0), 1);
  const t = a + (b - a) * clamped;
  return new Date(t).toISOString().replace(/\.\d{3}Z$/, "Z");
}
