/** Client-side recomputation of window counts and bin lookups.
 *
 * These mirror the engine formulas exactly: inputs come from the bundle's
 * canonical JSON, both sides work in IEEE doubles, and the bin rule is the
 * same half-open-with-closed-top lookup, so results agree bit for bit.
 */

import type { Bundle } from "./types.js";

export interface WindowCounts {
  nPre: number;
  nPost: number;
  nEarly: number;
  nRecent: number;
  trend: number;
}

/** Counts for a window of half-width t over day offsets (day 0 never counts). */
export function windowCounts(offsets: readonly number[], t: number): WindowCounts {
  const half = Math.trunc(t / 2);
  let nPre = 0;
  let nPost = 0;
  let nEarly = 0;
  let nRecent = 0;
  for (const o of offsets) {
    if (o >= -t && o <= -1) {
      nPre += 1;
      if (o <= -half - 1) {
        nEarly += 1;
      } else {
        nRecent += 1;
      }
    } else if (o >= 1 && o <= t) {
      nPost += 1;
    }
  }
  return { nPre, nPost, nEarly, nRecent, trend: nRecent - nEarly };
}

/** Index of the half-open bin [e_i, e_{i+1}) holding value; ends clamp. */
export function binIndex(edges: readonly number[], value: number): number {
  const k = edges.length - 1;
  if (k <= 0) {
    return 0;
  }
  let lo = 0;
  let hi = edges.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (value < (edges[mid] as number)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return Math.min(Math.max(lo - 1, 0), k - 1);
}

/** Even half-widths the scene-2 handles may take. */
export function dragRange(bundle: Bundle): number[] {
  const tb = bundle.data.trend_bins;
  const out: number[] = [];
  for (let t = tb.half_width_min; t <= tb.half_width_max; t += 2) {
    out.push(t);
  }
  return out;
}

/** Do the two actors' trends land in different bins at this half-width? */
export function isInvalidPair(bundle: Bundle, halfWidth: number): boolean {
  const tb = bundle.data.trend_bins;
  const t = windowCounts(tb.offsets.treatment, halfWidth).trend;
  const c = windowCounts(tb.offsets.control, halfWidth).trend;
  return binIndex(tb.edges, t) !== binIndex(tb.edges, c);
}

export function clampHalfWidth(bundle: Bundle, raw: number): number {
  const tb = bundle.data.trend_bins;
  let t = Math.round(raw / 2) * 2;
  t = Math.max(tb.half_width_min, Math.min(tb.half_width_max, t));
  return t;
}
