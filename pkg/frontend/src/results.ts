/** Scene-4 logic: heatmap layout, diverging colors, legend mapping. */

import type { Bundle, HeatCell, Heatmap } from "./types.js";

export interface TileLayout {
  cellIndex: number;
  x: number;
  y: number;
  side: number;
  cx: number;
  cy: number;
}

/** Tile positions on a radius-by-half-width grid; side scales with the
 * bundle's significance fraction. */
export function tileLayout(heat: Heatmap, width: number, height: number): TileLayout[] {
  const nx = heat.radii.length;
  const ny = heat.half_widths.length;
  const cellW = width / nx;
  const cellH = height / ny;
  const full = Math.min(cellW, cellH);
  const out: TileLayout[] = [];
  heat.cells.forEach((cell, i) => {
    const xi = heat.radii.indexOf(cell.radius_km);
    const yi = heat.half_widths.indexOf(cell.half_width_days);
    const side = full * cell.side_fraction;
    const cx = (xi + 0.5) * cellW;
    const cy = height - (yi + 0.5) * cellH; // larger half-widths upward
    out.push({ cellIndex: i, x: cx - side / 2, y: cy - side / 2, side, cx, cy });
  });
  return out;
}

function hexChannel(hex: string, i: number): number {
  const h = hex.replace("#", "");
  const full = h.length === 3 ? h.split("").map((c) => c + c).join("") : h;
  return parseInt(full.slice(i * 2, i * 2 + 2), 16);
}

function mix(a: string, b: string, t: number): string {
  const ch = (i: number) =>
    Math.round(hexChannel(a, i) + (hexChannel(b, i) - hexChannel(a, i)) * t);
  return `rgb(${ch(0)},${ch(1)},${ch(2)})`;
}

const MIDPOINT = "#f7f4f0";

/** Diverging fill: theme negative color at the domain floor, near-white at
 * zero, theme positive color at the ceiling. */
export function colorFor(estimate: number, domain: [number, number],
                         theme: Record<string, string>): string {
  const hi = domain[1] === 0 ? 1 : domain[1];
  const t = Math.max(-1, Math.min(1, estimate / hi));
  if (t >= 0) {
    return mix(MIDPOINT, theme["positive"] ?? "#b2182b", t);
  }
  return mix(MIDPOINT, theme["negative"] ?? "#2166ac", -t);
}

/** Fraction along the legend (0 = domain floor, 1 = ceiling). */
export function legendPosition(estimate: number, domain: [number, number]): number {
  const [lo, hi] = domain;
  if (hi === lo) {
    return 0.5;
  }
  return Math.max(0, Math.min(1, (estimate - lo) / (hi - lo)));
}

export function cellAt(bundle: Bundle, radiusKm: number,
                       halfWidthDays: number): HeatCell | undefined {
  return bundle.data.heatmap.cells.find(
    (c) => c.radius_km === radiusKm && c.half_width_days === halfWidthDays,
  );
}

export function formatEstimate(cell: HeatCell): string {
  return cell.degenerate ? "no estimate" : cell.estimate.toFixed(2);
}
