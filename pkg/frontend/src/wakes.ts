/** Scene-1 logic: map-panel projection, synchronized viewports, tile math. */

import type { ActorSlice, Bundle, SliceEvent } from "./types.js";
import type { Viewport } from "./state.js";

export const KM_PER_DEG = (Math.PI * 6371.0088) / 180;

/** Default viewport: centered on the actor, scaled so twice the reference
 * radius fits comfortably. */
export function defaultViewport(slice: ActorSlice, radiusKm: number,
                                panelPx: number): Viewport {
  return { lon: slice.lon, lat: slice.lat, kmPerPx: (radiusKm * 2.6) / panelPx };
}

/** Equirectangular projection around the viewport center. */
export function project(lon: number, lat: number, vp: Viewport,
                        panelPx: number): { x: number; y: number } {
  const kx = (KM_PER_DEG * Math.cos((vp.lat * Math.PI) / 180)) / vp.kmPerPx;
  const ky = KM_PER_DEG / vp.kmPerPx;
  return {
    x: panelPx / 2 + (lon - vp.lon) * kx,
    y: panelPx / 2 - (lat - vp.lat) * ky,
  };
}

export function circleRadiusPx(radiusKm: number, vp: Viewport): number {
  return radiusKm / vp.kmPerPx;
}

export type Phase = "pre" | "intervention" | "post";

/** Events a panel draws: pre shows the days before, post the days after,
 * and the middle panel the intervention's own day. */
export function panelEvents(slice: ActorSlice, phase: Phase): SliceEvent[] {
  if (phase === "pre") {
    return slice.events.filter((e) => e.offset < 0);
  }
  if (phase === "post") {
    return slice.events.filter((e) => e.offset > 0);
  }
  return slice.events.filter((e) => e.offset === 0);
}

export function hoverLabel(e: SliceEvent): string {
  const when = e.offset === 0 ? "day 0" : `day ${e.offset > 0 ? "+" : ""}${e.offset}`;
  return `${e.id}: ${when}, ${e.distance_km.toFixed(1)} km away`;
}

/** Pan a viewport by pixel deltas (shared by all panels of one arm). */
export function pan(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  const kx = KM_PER_DEG * Math.cos((vp.lat * Math.PI) / 180);
  return {
    lon: vp.lon - (dxPx * vp.kmPerPx) / kx,
    lat: Math.max(-89, Math.min(89, vp.lat + (dyPx * vp.kmPerPx) / KM_PER_DEG)),
    kmPerPx: vp.kmPerPx,
  };
}

export function zoom(vp: Viewport, factor: number): Viewport {
  const kmPerPx = Math.max(0.001, Math.min(1000, vp.kmPerPx * factor));
  return { ...vp, kmPerPx };
}

export interface TileRef {
  z: number;
  x: number;
  y: number;
  url: string;
  px: number;
  py: number;
  sizePx: number;
}

function lonToTileX(lon: number, z: number): number {
  return ((lon + 180) / 360) * 2 ** z;
}

function latToTileY(lat: number, z: number): number {
  const rad = (lat * Math.PI) / 180;
  return ((1 - Math.log(Math.tan(rad) + 1 / Math.cos(rad)) / Math.PI) / 2) * 2 ** z;
}

/** Raster tiles covering a panel, if the bundle carries a tile template.
 *
 * The slippy-tile mercator grid does not line up exactly with the local
 * equirectangular projection; at city-to-region scales the mismatch is well
 * under a pixel, which is fine for a backdrop.
 */
export function visibleTiles(bundle: Bundle, vp: Viewport, panelPx: number): TileRef[] {
  const template = bundle.meta.tile_url_template;
  if (!template) {
    return [];
  }
  const degPerPanel = (panelPx * vp.kmPerPx) / (KM_PER_DEG * Math.cos((vp.lat * Math.PI) / 180));
  let z = Math.round(Math.log2(360 / degPerPanel / (256 / panelPx)));
  z = Math.max(1, Math.min(18, z));
  const scale = 2 ** z;
  const x0 = lonToTileX(vp.lon, z);
  const y0 = latToTileY(vp.lat, z);
  const span = panelPx / 256 / 2 + 1;
  const out: TileRef[] = [];
  for (let x = Math.floor(x0 - span); x <= Math.floor(x0 + span); x++) {
    for (let y = Math.floor(y0 - span); y <= Math.floor(y0 + span); y++) {
      if (y < 0 || y >= scale) {
        continue;
      }
      const wrapped = ((x % scale) + scale) % scale;
      out.push({
        z,
        x: wrapped,
        y,
        url: template
          .replace("{z}", String(z))
          .replace("{x}", String(wrapped))
          .replace("{y}", String(y)),
        px: panelPx / 2 + (x - x0) * 256,
        py: panelPx / 2 + (y - y0) * 256,
        sizePx: 256,
      });
    }
  }
  return out;
}

/** Graticule line positions for the no-tile fallback. */
export function graticule(vp: Viewport, panelPx: number, stepDeg: number):
    { lons: number[]; lats: number[] } {
  const degSpanX = (panelPx * vp.kmPerPx) / (KM_PER_DEG * Math.cos((vp.lat * Math.PI) / 180));
  const degSpanY = (panelPx * vp.kmPerPx) / KM_PER_DEG;
  const lons: number[] = [];
  const lats: number[] = [];
  const lon0 = Math.floor((vp.lon - degSpanX / 2) / stepDeg) * stepDeg;
  for (let lon = lon0; lon <= vp.lon + degSpanX / 2; lon += stepDeg) {
    lons.push(lon);
  }
  const lat0 = Math.floor((vp.lat - degSpanY / 2) / stepDeg) * stepDeg;
  for (let lat = lat0; lat <= vp.lat + degSpanY / 2; lat += stepDeg) {
    lats.push(lat);
  }
  return { lons, lats };
}
