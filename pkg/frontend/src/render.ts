/** HTML/SVG string renderers for the slideshow.
 *
 * Everything here is a pure function of (state, bundle); the DOM glue in
 * main.ts swaps the output in and handles events by delegation, so the view
 * is always derived state, never mutated in place.
 */

import { allHistograms, armTotals, applyFilters } from "./matching.js";
import { colorFor, formatEstimate, legendPosition, tileLayout } from "./results.js";
import type { ViewerState } from "./state.js";
import { renderTextBlock, escapeHtml } from "./text.js";
import { dragRange, isInvalidPair, windowCounts } from "./trend.js";
import type { Arm, Bundle, Mark, Scene, Shot, SliceEvent } from "./types.js";
import {
  circleRadiusPx, defaultViewport, graticule, hoverLabel, panelEvents,
  project, visibleTiles, type Phase,
} from "./wakes.js";

const PANEL = 190;

function currentShot(state: ViewerState, bundle: Bundle): Shot {
  const scene = bundle.scenes[state.scene] as Scene;
  return scene.shots[state.shot] as Shot;
}

function markIds(shot: Shot): Set<string> {
  return new Set(shot.view_state.marks.map((m) => m.id));
}

function markClass(shot: Shot, state: ViewerState, id: string): string {
  return state.animating && shot.entering_marks.includes(id) ? "entering" : "";
}

// --- scene 1: synchronized map panels ------------------------------------------

function mapPanel(
  bundle: Bundle, state: ViewerState, shot: Shot, arm: Arm, phase: Phase,
): string {
  const short = arm === "treatment" ? "t" : "c";
  const panelId = `${short}-${phase === "intervention" ? "mid" : phase}-panel`;
  if (!markIds(shot).has(panelId)) {
    return `<div class="panel placeholder"></div>`;
  }
  const slice = bundle.data.actor_slices[arm];
  const cfg = bundle.scenes[0]?.config as { radius_km: number };
  const vp = state.interaction.viewports[arm]
    ?? defaultViewport(slice, cfg.radius_km, PANEL);
  const theme = bundle.theme;
  const cls = markClass(shot, state, panelId);

  // graticule always renders; tiles, when configured, draw over it, so an
  // unreachable tile server still leaves a usable map
  let body = "";
  const g = graticule(vp, PANEL, 0.25);
  body += g.lons.map((lon) => {
    const { x } = project(lon, vp.lat, vp, PANEL);
    return `<line class="grat" x1="${x.toFixed(1)}" y1="0" x2="${x.toFixed(1)}" y2="${PANEL}"/>`;
  }).join("");
  body += g.lats.map((lat) => {
    const { y } = project(vp.lon, lat, vp, PANEL);
    return `<line class="grat" x1="0" y1="${y.toFixed(1)}" x2="${PANEL}" y2="${y.toFixed(1)}"/>`;
  }).join("");
  body += visibleTiles(bundle, vp, PANEL).map((t) =>
    `<image href="${escapeHtml(t.url)}" x="${t.px}" y="${t.py}" width="${t.sizePx}" height="${t.sizePx}" opacity="0.55"/>`,
  ).join("");

  const circleId = `${short}-${phase === "intervention" ? "mid" : phase}-circle`;
  if (markIds(shot).has(circleId) || phase !== "intervention") {
    const c = project(slice.lon, slice.lat, vp, PANEL);
    const r = circleRadiusPx(cfg.radius_km, vp);
    const color = theme[arm] ?? "#444";
    body += `<circle class="refcircle ${markClass(shot, state, circleId)}" cx="${c.x.toFixed(1)}" cy="${c.y.toFixed(1)}" r="${r.toFixed(1)}" stroke="${color}"/>`;
  }

  if (phase === "intervention") {
    const c = project(slice.lon, slice.lat, vp, PANEL);
    body += `<path class="marker" transform="translate(${c.x.toFixed(1)},${c.y.toFixed(1)})" d="M0,-7 L6,5 L-6,5 Z" fill="${theme[arm]}"/>`;
  }

  for (const e of panelEvents(slice, phase)) {
    const p = project(e.lon, e.lat, vp, PANEL);
    if (p.x < -5 || p.x > PANEL + 5 || p.y < -5 || p.y > PANEL + 5) {
      continue;
    }
    body += `<circle class="ev" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="3.2" fill="${theme["dependent"]}"><title>${escapeHtml(hoverLabel(e))}</title></circle>`;
  }

  const captions: Record<Phase, string> = {
    pre: "before", intervention: "day 0", post: "after",
  };
  return `<div class="panel ${cls}" data-map-arm="${arm}">
    <svg viewBox="0 0 ${PANEL} ${PANEL}" width="${PANEL}" height="${PANEL}" data-map-arm="${arm}">${body}</svg>
    <div class="cap">${captions[phase]}</div>
  </div>`;
}

function timeline(bundle: Bundle, state: ViewerState, shot: Shot, arm: Arm): string {
  const short = arm === "treatment" ? "t" : "c";
  if (!markIds(shot).has(`${short}-timeline`)) {
    return "";
  }
  const cfg = bundle.scenes[0]?.config as { max_offset_days: number; radius_km: number };
  const tMax = cfg.max_offset_days;
  const slice = bundle.data.actor_slices[arm];
  const w = PANEL * 3 + 16;
  const xOf = (o: number) => ((o + tMax) / (2 * tMax)) * (w - 20) + 10;
  let ticks = "";
  for (const e of slice.events) {
    if (e.distance_km <= cfg.radius_km) {
      ticks += `<line class="tick" x1="${xOf(e.offset).toFixed(1)}" y1="4" x2="${xOf(e.offset).toFixed(1)}" y2="16" stroke="${bundle.theme["dependent"]}"><title>${escapeHtml(hoverLabel(e))}</title></line>`;
    }
  }
  const zero = xOf(0).toFixed(1);
  return `<svg class="timeline ${markClass(shot, state, `${short}-timeline`)}" width="${w}" height="22">
    <line x1="10" y1="18" x2="${w - 10}" y2="18" class="axis"/>
    <line x1="${zero}" y1="0" x2="${zero}" y2="18" stroke="${bundle.theme[arm]}" stroke-width="2"/>
    ${ticks}
  </svg>`;
}

function hintNote(state: ViewerState, shot: Shot, id: string, text: string): string {
  if (!markIds(shot).has(id)) {
    return "";
  }
  return `<div class="hintnote ${markClass(shot, state, id)}">${text}</div>`;
}

function renderWakes(state: ViewerState, bundle: Bundle): string {
  const shot = currentShot(state, bundle);
  const rows: string[] = [];
  for (const arm of ["treatment", "control"] as Arm[]) {
    const short = arm === "treatment" ? "t" : "c";
    const hasAny = ["pre", "mid", "post"].some((p) => markIds(shot).has(`${short}-${p}-panel`));
    if (!hasAny) {
      continue;
    }
    rows.push(`<div class="maprow">
      <div class="rowlabel" style="color:${bundle.theme[arm]}">${escapeHtml(bundle.meta.labels[arm])}</div>
      <div class="panels">
        ${mapPanel(bundle, state, shot, arm, "pre")}
        ${mapPanel(bundle, state, shot, arm, "intervention")}
        ${mapPanel(bundle, state, shot, arm, "post")}
      </div>
      ${timeline(bundle, state, shot, arm)}
    </div>`);
  }
  const hint = hintNote(state, shot, "wakes-hint",
    "Drag a map to pan its row, scroll to zoom, hover an event for details.");
  return `<div class="scene-wakes">${rows.join("")}${hint}</div>`;
}

// --- scene 2: trend strips with draggable window --------------------------------

function trendStrip(bundle: Bundle, state: ViewerState, shot: Shot, arm: Arm,
                    width: number): string {
  const short = arm === "treatment" ? "t" : "c";
  if (!markIds(shot).has(`${short}-strip`)) {
    return "";
  }
  const tb = bundle.data.trend_bins;
  const tMax = tb.half_width_max;
  const t = state.interaction.halfWidth;
  const offsets = tb.offsets[arm];
  const counts = windowCounts(offsets, t);
  const theme = bundle.theme;
  const xOf = (o: number) => ((o + tMax) / (2 * tMax)) * (width - 40) + 20;
  const h = 92;

  let body = `<line class="axis" x1="20" y1="${h - 18}" x2="${width - 20}" y2="${h - 18}"/>`;
  body += `<rect class="band ${markClass(shot, state, `${short}-window`)}" x="${xOf(-t).toFixed(1)}" y="14" width="${(xOf(t) - xOf(-t)).toFixed(1)}" height="${h - 32}" fill="${theme[arm]}" opacity="0.12"/>`;

  if (markIds(shot).has(`${short}-halves`)) {
    const half = Math.trunc(t / 2);
    const cls = markClass(shot, state, `${short}-halves`);
    body += `<rect class="half ${cls}" x="${xOf(-t).toFixed(1)}" y="14" width="${(xOf(-half - 1) - xOf(-t)).toFixed(1)}" height="6" fill="${theme[arm]}" opacity="0.45"><title>early half: ${counts.nEarly}</title></rect>`;
    body += `<rect class="half ${cls}" x="${xOf(-half).toFixed(1)}" y="14" width="${(xOf(-1) - xOf(-half)).toFixed(1)}" height="6" fill="${theme[arm]}" opacity="0.8"><title>recent half: ${counts.nRecent}</title></rect>`;
  }

  const stacks = new Map<number, number>();
  for (const o of offsets) {
    const n = stacks.get(o) ?? 0;
    stacks.set(o, n + 1);
    const inWindow = o !== 0 && Math.abs(o) <= t;
    body += `<circle class="ev" cx="${xOf(o).toFixed(1)}" cy="${(h - 26 - n * 7).toFixed(1)}" r="3" fill="${theme["dependent"]}" opacity="${inWindow ? 1 : 0.25}"><title>day ${o > 0 ? "+" : ""}${o}</title></circle>`;
  }

  const zero = xOf(0).toFixed(1);
  body += `<line x1="${zero}" y1="8" x2="${zero}" y2="${h - 18}" stroke="${theme[arm]}" stroke-width="2"/>`;

  let label = `${counts.nPre} before, ${counts.nPost} after`;
  if (markIds(shot).has(`${short}-trend-label`)) {
    label += `<span class="${markClass(shot, state, `${short}-trend-label`)}">;
      trend ${counts.trend >= 0 ? "+" : ""}${counts.trend}</span>`;
  }
  if (markIds(shot).has("drag-handles")) {
    for (const side of [-1, 1]) {
      body += `<rect class="handle" data-handle-arm="${arm}" x="${(xOf(side * t) - 4).toFixed(1)}" y="12" width="8" height="${h - 28}" rx="3"/>`;
    }
  }
  return `<div class="strip ${markClass(shot, state, `${short}-strip`)}">
    <div class="rowlabel" style="color:${theme[arm]}">${escapeHtml(bundle.meta.labels[arm])}
      <span class="counts">${label}</span></div>
    <svg width="${width}" height="${h}" data-strip-arm="${arm}">${body}</svg>
  </div>`;
}

function renderTrend(state: ViewerState, bundle: Bundle): string {
  const shot = currentShot(state, bundle);
  const width = PANEL * 3 + 16;
  const t = state.interaction.halfWidth;
  const invalid = markIds(shot).has("validity-flag") && isInvalidPair(bundle, t);
  const range = dragRange(bundle);
  const slider = markIds(shot).has("drag-handles")
    ? `<div class="dragbar ${markClass(shot, state, "drag-handles")}">half-width
         <input type="range" min="${range[0]}" max="${range[range.length - 1]}" step="2"
                value="${t}" data-halfwidth-slider/>
         <b>${t} days</b> each side</div>`
    : "";
  const warn = invalid
    ? `<div class="invalid">At this window the two trends fall into different matching
       bins: the pair would no longer be considered comparable.</div>`
    : "";
  return `<div class="scene-trend ${invalid ? "invalid-pair" : ""}">
    ${trendStrip(bundle, state, shot, "treatment", width)}
    ${trendStrip(bundle, state, shot, "control", width)}
    ${slider}${warn}
  </div>`;
}

// --- scene 3: paired histograms with cross-filtering ------------------------------

function renderMatching(state: ViewerState, bundle: Bundle): string {
  const shot = currentShot(state, bundle);
  const ids = markIds(shot);
  const table = bundle.data.covariate_table;
  const visible = table.variables.filter((v) => ids.has(`hist-${v.name}`));
  const { filters, matchedOnly } = state.interaction;
  const hists = allHistograms(bundle, filters, matchedOnly);
  const theme = bundle.theme;

  const charts = visible.map((variable) => {
    const h = hists.find((x) => x.variable === variable.name);
    if (!h) {
      return "";
    }
    const maxCount = Math.max(1, ...h.treatment, ...h.control);
    const bw = Math.max(10, Math.min(26, 150 / h.binCount));
    const width = h.binCount * (bw * 2 + 6) + 8;
    let bars = "";
    for (let b = 0; b < h.binCount; b++) {
      const ht = ((h.treatment[b] ?? 0) / maxCount) * 70;
      const hc = ((h.control[b] ?? 0) / maxCount) * 70;
      const x = 4 + b * (bw * 2 + 6);
      const filterable = ids.has("filter-brush") ? `data-filter-var="${escapeHtml(variable.name)}" data-filter-bin="${b}"` : "";
      bars += `<g class="binpair" ${filterable}>
        <rect x="${x}" y="${(78 - ht).toFixed(1)}" width="${bw}" height="${ht.toFixed(1)}" fill="${theme["treatment"]}"><title>${h.treatment[b]} treatment</title></rect>
        <rect x="${x + bw + 1}" y="${(78 - hc).toFixed(1)}" width="${bw}" height="${hc.toFixed(1)}" fill="${theme["control"]}"><title>${h.control[b]} control</title></rect>
      </g>`;
    }
    const active = filters[variable.name] ? " filtered" : "";
    return `<div class="hist${active} ${markClass(shot, state, `hist-${variable.name}`)}">
      <div class="histtitle">${escapeHtml(variable.name)}</div>
      <svg width="${width}" height="80">${bars}</svg>
    </div>`;
  }).join("");

  const totals = armTotals(applyFilters(table.rows, filters, matchedOnly));
  const overlay = ids.has("matched-totals")
    ? `<div class="totals ${markClass(shot, state, "matched-totals")}">showing
       <b style="color:${theme["treatment"]}">${totals.treatment}</b> treatment /
       <b style="color:${theme["control"]}">${totals.control}</b> control
       (matched: ${table.matched_totals.treatment} / ${table.matched_totals.control})</div>`
    : "";
  const toggle = ids.has("matched-toggle")
    ? `<label class="toggle ${markClass(shot, state, "matched-toggle")}">
       <input type="checkbox" data-matched-toggle ${matchedOnly ? "checked" : ""}/>
       only matched interventions</label>`
    : "";
  const clear = ids.has("filter-brush") && Object.keys(filters).length
    ? `<button class="clearbtn" data-clear-filters>clear filters</button>`
    : "";
  return `<div class="scene-matching">
    <div class="histgrid">${charts}</div>
    <div class="matchbar">${overlay}${toggle}${clear}</div>
  </div>`;
}

// --- scene 4: results heatmap -----------------------------------------------------

function renderResults(state: ViewerState, bundle: Bundle): string {
  const shot = currentShot(state, bundle);
  const ids = markIds(shot);
  const heat = bundle.data.heatmap;
  const theme = bundle.theme;
  const W = 430;
  const H = 330;
  const refMark = shot.view_state.marks.find((m) => m.id === "heat-ref-cell") as Mark | undefined;
  const showAll = ids.has("heat-tiles");
  const layout = tileLayout(heat, W, H);

  let tiles = "";
  for (const tl of layout) {
    const cell = heat.cells[tl.cellIndex];
    if (!cell) {
      continue;
    }
    const isRef = refMark !== undefined
      && cell.radius_km === (refMark["radius_km"] as number)
      && cell.half_width_days === (refMark["half_width_days"] as number);
    if (!showAll && !isRef) {
      continue;
    }
    const hovered = state.interaction.hoveredCell === tl.cellIndex;
    const fill = cell.degenerate ? "none" : colorFor(cell.estimate, heat.color_domain, theme);
    const cls = `tile ${cell.degenerate ? "degenerate" : ""} ${hovered ? "hovered" : ""} ${isRef ? markClass(shot, state, "heat-ref-cell") : markClass(shot, state, "heat-tiles")}`;
    const tip = cell.degenerate
      ? `${cell.radius_km} km, ${cell.half_width_days} d: insufficient variation`
      : `${cell.radius_km} km, ${cell.half_width_days} d: estimate ${formatEstimate(cell)}, p = ${cell.p_value.toFixed(3)}, matched ${cell.n_matched_t}/${cell.n_matched_c}`;
    tiles += `<rect class="${cls}" data-cell="${tl.cellIndex}" x="${(40 + tl.x).toFixed(1)}" y="${(10 + tl.y).toFixed(1)}" width="${tl.side.toFixed(1)}" height="${tl.side.toFixed(1)}" fill="${fill}"><title>${escapeHtml(tip)}</title></rect>`;
  }

  let axes = "";
  heat.radii.forEach((r, i) => {
    axes += `<text class="axislabel" x="${40 + ((i + 0.5) * W) / heat.radii.length}" y="${H + 28}" text-anchor="middle">${r}</text>`;
  });
  heat.half_widths.forEach((t, i) => {
    axes += `<text class="axislabel" x="30" y="${10 + H - ((i + 0.5) * H) / heat.half_widths.length}" text-anchor="end">${t}</text>`;
  });
  axes += `<text class="axistitle" x="${40 + W / 2}" y="${H + 44}" text-anchor="middle">radius (km)</text>`;
  axes += `<text class="axistitle" x="12" y="${H / 2}" text-anchor="middle" transform="rotate(-90 12 ${H / 2})">half-width (days)</text>`;

  let legend = "";
  if (ids.has("legend-positive")) {
    const hovered = state.interaction.hoveredCell;
    const lw = 180;
    const stops = Array.from({ length: 13 }, (_, i) => {
      const e = heat.color_domain[0] + ((heat.color_domain[1] - heat.color_domain[0]) * i) / 12;
      return `<rect x="${(i * lw) / 13}" y="0" width="${lw / 13 + 1}" height="10" fill="${colorFor(e, heat.color_domain, theme)}"/>`;
    }).join("");
    let marker = "";
    if (hovered !== null) {
      const cell = heat.cells[hovered];
      if (cell && !cell.degenerate) {
        const x = legendPosition(cell.estimate, heat.color_domain) * lw;
        marker = `<path class="legmark" d="M${x.toFixed(1)},16 l-5,8 h10 Z"/>`;
      }
    }
    legend = `<div class="legend ${markClass(shot, state, "legend-positive")}">
      <span style="color:${theme["negative"]}">fewer</span>
      <svg width="${lw}" height="26">${stops}${marker}</svg>
      <span style="color:${theme["positive"]}">more</span>
    </div>`;
  }

  const hint = hintNote(state, shot, "results-hint",
    "Hover a tile for its estimate, p-value and matched counts.");
  return `<div class="scene-results">
    <svg width="${W + 60}" height="${H + 50}">${tiles}${axes}</svg>
    ${legend}${hint}
  </div>`;
}

// --- chrome ----------------------------------------------------------------------

function breadcrumbs(state: ViewerState, bundle: Bundle): string {
  const groups = bundle.scenes.map((scene, si) => {
    const dots = scene.shots.map((_, hi) => {
      const here = si === state.scene && hi === state.shot;
      const seen = si < state.scene || (si === state.scene && hi <= state.shot);
      return `<button class="crumb ${here ? "here" : ""} ${seen ? "seen" : ""}"
        data-jump="${si},${hi}" title="${escapeHtml(scene.title)}, shot ${hi + 1}"></button>`;
    }).join("");
    return `<div class="crumbgroup ${si === state.scene ? "active" : ""}">
      <span class="crumbtitle" data-jump="${si},0">${escapeHtml(scene.title)}</span>
      <div class="dots">${dots}</div>
    </div>`;
  }).join("");
  return `<nav class="breadcrumbs">${groups}</nav>`;
}

function sceneBody(state: ViewerState, bundle: Bundle): string {
  switch (bundle.scenes[state.scene]?.id) {
    case "wakes": return renderWakes(state, bundle);
    case "trend": return renderTrend(state, bundle);
    case "matching": return renderMatching(state, bundle);
    case "results": return renderResults(state, bundle);
    default: return "";
  }
}

export function renderIntro(bundle: Bundle): string {
  const outline = bundle.intro.outline.map((o, i) =>
    `<li><b>${escapeHtml(bundle.scenes[i]?.title ?? "")}.</b> ${escapeHtml(o)}</li>`).join("");
  const background = bundle.intro.background
    ? `<p>${escapeHtml(bundle.intro.background)}</p>` : "";
  return `<div class="overlay" data-overlay>
    <div class="popup">
      <h1>${escapeHtml(bundle.intro.hook)}</h1>
      ${background}
      <ol>${outline}</ol>
      <p class="src">Data: ${escapeHtml(bundle.meta.data_source)}</p>
      <button class="primary" data-dismiss-overlay>Start the story</button>
    </div>
  </div>`;
}

export function renderResolution(bundle: Bundle): string {
  const refs = bundle.resolution.references.map((r) =>
    `<li><a href="${escapeHtml(r)}" target="_blank" rel="noopener">${escapeHtml(r)}</a></li>`).join("");
  const downloads = bundle.resolution.download_refs.map((r) =>
    `<a class="dl" href="${escapeHtml(r)}" download>${escapeHtml(r)}</a>`).join(" ");
  return `<div class="overlay" data-overlay>
    <div class="popup">
      <h1>In short</h1>
      <p>${escapeHtml(bundle.resolution.summary)}</p>
      <p>Download the results: ${downloads}</p>
      ${refs ? `<h2>References</h2><ul>${refs}</ul>` : ""}
      <button class="primary" data-dismiss-overlay>Back to the story</button>
    </div>
  </div>`;
}

export function renderApp(state: ViewerState, bundle: Bundle): string {
  const scene = bundle.scenes[state.scene] as Scene;
  const shot = currentShot(state, bundle);
  const atEnd = state.scene === bundle.scenes.length - 1
    && state.shot === scene.shots.length - 1;
  return `
  ${breadcrumbs(state, bundle)}
  <main>
    <section class="vis">${sceneBody(state, bundle)}</section>
    <aside class="textpanel">
      <h2>${escapeHtml(scene.title)}</h2>
      <p class="summary">${escapeHtml(scene.summary)}</p>
      ${renderTextBlock(shot.text, bundle.theme)}
      ${shot.interactive ? `<p class="trynote">This view is interactive: try it before moving on.</p>` : ""}
    </aside>
  </main>
  <footer>
    <button data-action="back" ${state.scene === 0 && state.shot === 0 ? "disabled" : ""}>&#8592; Back</button>
    <button class="primary" data-action="next" ${atEnd ? "disabled" : ""}>Next &#9654;</button>
    <button data-action="ff" ${atEnd && !state.animating ? "disabled" : ""}>Fast-forward &#9654;&#9654;</button>
    <span class="spacer"></span>
    ${atEnd ? `<button class="primary" data-action="finish">Finish: summary &amp; downloads</button>` : ""}
    <button data-action="intro">About</button>
  </footer>`;
}
