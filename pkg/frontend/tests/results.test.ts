/** Scene-4 layout and encodings. */

import { describe, expect, it } from "vitest";
import { colorFor, legendPosition, tileLayout } from "../src/results.js";
import { renderApp } from "../src/render.js";
import { defaultInteraction } from "../src/state.js";
import type { Bundle } from "../src/types.js";
import bundleJson from "./fixtures/bundle.json";

const bundle = bundleJson as unknown as Bundle;
const heat = bundle.data.heatmap;

describe("tile layout", () => {
  it("sides follow the bundle's significance fractions", () => {
    const layout = tileLayout(heat, 300, 300);
    const full = Math.min(300 / heat.radii.length, 300 / heat.half_widths.length);
    for (const tl of layout) {
      const cell = heat.cells[tl.cellIndex]!;
      expect(tl.side).toBeCloseTo(full * cell.side_fraction, 9);
    }
  });

  it("p = 1 gives a 40% tile, p <= 0.001 a full tile", () => {
    const cells = heat.cells;
    for (const cell of cells) {
      expect(cell.side_fraction).toBeGreaterThanOrEqual(0.4);
      expect(cell.side_fraction).toBeLessThanOrEqual(1.0);
      if (cell.p_value >= 1) {
        expect(cell.side_fraction).toBeCloseTo(0.4, 9);
      }
      if (cell.p_value <= 0.001) {
        expect(cell.side_fraction).toBeCloseTo(1.0, 9);
      }
    }
  });

  it("tiles are centered in their grid cells", () => {
    const layout = tileLayout(heat, 330, 330);
    for (const tl of layout) {
      expect(tl.x + tl.side / 2).toBeCloseTo(tl.cx, 9);
      expect(tl.y + tl.side / 2).toBeCloseTo(tl.cy, 9);
    }
  });
});

describe("color scale", () => {
  it("domain is symmetric around zero", () => {
    expect(heat.color_domain[0]).toBe(-heat.color_domain[1]);
  });

  it("zero maps to the neutral midpoint, extremes to the theme colors", () => {
    const theme = { positive: "#ff0000", negative: "#0000ff" };
    const domain: [number, number] = [-2, 2];
    expect(colorFor(0, domain, theme)).toBe("rgb(247,244,240)");
    expect(colorFor(2, domain, theme)).toBe("rgb(255,0,0)");
    expect(colorFor(-2, domain, theme)).toBe("rgb(0,0,255)");
    expect(colorFor(99, domain, theme)).toBe("rgb(255,0,0)"); // clamps
  });

  it("legend position is linear in the estimate", () => {
    const domain: [number, number] = [-4, 4];
    expect(legendPosition(-4, domain)).toBe(0);
    expect(legendPosition(0, domain)).toBe(0.5);
    expect(legendPosition(4, domain)).toBe(1);
    expect(legendPosition(9, domain)).toBe(1); // clamps
  });
});

describe("rendered heatmap shot", () => {
  it("hovering a cell marks it and the degenerate cells stay unfilled", () => {
    const lastShot = bundle.scenes[3]!.shots.length - 1;
    const hoverable = heat.cells.findIndex((c) => !c.degenerate);
    const html = renderApp({
      scene: 3, shot: lastShot, animating: false,
      interaction: { ...defaultInteraction(bundle), hoveredCell: hoverable },
    }, bundle);
    expect(html).toContain("hovered");
    if (heat.cells.some((c) => c.degenerate)) {
      expect(html).toContain('fill="none"');
    }
    expect(html).toContain("legmark"); // hover marks the legend too
  });

  it("the first shot shows only the reference tile", () => {
    const html = renderApp({
      scene: 3, shot: 0, animating: false,
      interaction: defaultInteraction(bundle),
    }, bundle);
    const tiles = html.match(/class="tile/g) ?? [];
    expect(tiles.length).toBe(1);
  });

  it("the final shot shows every cell", () => {
    const lastShot = bundle.scenes[3]!.shots.length - 1;
    const html = renderApp({
      scene: 3, shot: lastShot, animating: false,
      interaction: defaultInteraction(bundle),
    }, bundle);
    const tiles = html.match(/class="tile/g) ?? [];
    expect(tiles.length).toBe(heat.cells.length);
  });
});
