/** DOM glue: bootstrapping, the dispatch loop, event delegation. */

import { renderApp, renderIntro, renderResolution } from "./render.js";
import { initialState, update, type Action, type ViewerState } from "./state.js";
import { clampHalfWidth } from "./trend.js";
import type { Arm, Bundle } from "./types.js";
import { defaultViewport, pan, zoom } from "./wakes.js";

const ANIMATION_MS = 650;
const PANEL = 190;

async function loadBundle(): Promise<Bundle> {
  const url = new URLSearchParams(window.location.search).get("bundle")
    ?? "../demo/out/bundle.json";
  const res = await fetch(url);
  if (!res.ok) {
    throw new Error(`could not load bundle from ${url}: ${res.status}`);
  }
  const bundle = (await res.json()) as Bundle;
  if (bundle.schema_version !== "1") {
    throw new Error(`unsupported bundle schema_version ${bundle.schema_version}`);
  }
  return bundle;
}

function start(bundle: Bundle): void {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  let state: ViewerState = initialState(bundle);
  let overlay: "intro" | "resolution" | null = "intro";
  let animationToken = 0;

  function render(): void {
    let html = renderApp(state, bundle);
    if (overlay === "intro") {
      html += renderIntro(bundle);
    } else if (overlay === "resolution") {
      html += renderResolution(bundle);
    }
    root!.innerHTML = html;
  }

  function dispatch(action: Action): void {
    state = update(state, action, bundle);
    if (state.animating) {
      const token = ++animationToken;
      window.setTimeout(() => {
        if (token === animationToken && state.animating) {
          dispatch({ kind: "fast_forward" }); // completes, same shot
        }
      }, ANIMATION_MS);
    }
    render();
  }

  root.addEventListener("click", (ev) => {
    const el = (ev.target as HTMLElement).closest<HTMLElement>(
      "[data-action],[data-jump],[data-dismiss-overlay],[data-clear-filters],[data-filter-var],[data-cell]");
    if (!el) {
      return;
    }
    if (el.dataset["dismissOverlay"] !== undefined) {
      overlay = null;
      render();
    } else if (el.dataset["action"] === "next") {
      dispatch({ kind: "next_animated" });
    } else if (el.dataset["action"] === "ff") {
      dispatch({ kind: "fast_forward" });
    } else if (el.dataset["action"] === "back") {
      dispatch({ kind: "back" });
    } else if (el.dataset["action"] === "finish") {
      overlay = "resolution";
      render();
    } else if (el.dataset["action"] === "intro") {
      overlay = "intro";
      render();
    } else if (el.dataset["jump"]) {
      const [s, h] = el.dataset["jump"].split(",").map(Number);
      dispatch({ kind: "jump", scene: s ?? 0, shot: h ?? 0 });
    } else if (el.dataset["clearFilters"] !== undefined) {
      dispatch({ kind: "clear_filters" });
    } else if (el.dataset["filterVar"]) {
      applyBinFilter(el.dataset["filterVar"], Number(el.dataset["filterBin"]));
    } else if (el.dataset["cell"]) {
      dispatch({ kind: "hover_cell", cell: Number(el.dataset["cell"]) });
    }
  });

  function applyBinFilter(variable: string, bin: number): void {
    const v = bundle.data.covariate_table.variables.find((x) => x.name === variable);
    if (!v) {
      return;
    }
    if (v.kind === "binary") {
      dispatch({ kind: "set_filter", variable, lo: bin, hi: bin });
      return;
    }
    const lo = v.edges[bin];
    const isLast = bin === v.edges.length - 2;
    const hi = v.edges[bin + 1];
    if (lo === undefined || hi === undefined) {
      return;
    }
    // half-open bins; the top bin closes, mirroring the matching rule
    dispatch({ kind: "set_filter", variable, lo, hi: isLast ? hi : hi - 1e-9 });
  }

  root.addEventListener("input", (ev) => {
    const el = ev.target as HTMLInputElement;
    if (el.dataset["halfwidthSlider"] !== undefined) {
      dispatch({ kind: "set_half_width", halfWidth: clampHalfWidth(bundle, Number(el.value)) });
    } else if (el.dataset["matchedToggle"] !== undefined) {
      dispatch({ kind: "toggle_matched_only" });
    }
  });

  root.addEventListener("mouseover", (ev) => {
    const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-cell]");
    if (el && state.scene === 3) {
      dispatch({ kind: "hover_cell", cell: Number(el.dataset["cell"]) });
    }
  });

  // synchronized pan (drag) and zoom (wheel) for the map panels of one arm
  let dragging: { arm: Arm; x: number; y: number } | null = null;
  // half-width handle drag on the scene-2 strips
  let handleDrag: { svg: SVGSVGElement } | null = null;

  root.addEventListener("mousedown", (ev) => {
    const target = ev.target as HTMLElement;
    const handle = target.closest<HTMLElement>("[data-handle-arm]");
    if (handle) {
      handleDrag = { svg: handle.closest("svg") as SVGSVGElement };
      ev.preventDefault();
      return;
    }
    const el = target.closest<HTMLElement>("[data-map-arm]");
    if (el) {
      dragging = { arm: el.dataset["mapArm"] as Arm, x: ev.clientX, y: ev.clientY };
      ev.preventDefault();
    }
  });
  window.addEventListener("mousemove", (ev) => {
    if (handleDrag) {
      const r = handleDrag.svg.getBoundingClientRect();
      const tMax = bundle.data.trend_bins.half_width_max;
      const frac = (ev.clientX - r.left - 20) / (r.width - 40);
      const offsetDays = frac * 2 * tMax - tMax;
      dispatch({ kind: "set_half_width",
                 halfWidth: clampHalfWidth(bundle, Math.abs(offsetDays)) });
      return;
    }
    if (!dragging) {
      return;
    }
    const vp = currentViewport(dragging.arm);
    const moved = pan(vp, ev.clientX - dragging.x, ev.clientY - dragging.y);
    dragging = { ...dragging, x: ev.clientX, y: ev.clientY };
    dispatch({ kind: "set_viewport", arm: dragging.arm, viewport: moved });
  });
  window.addEventListener("mouseup", () => {
    dragging = null;
    handleDrag = null;
  });
  root.addEventListener("wheel", (ev) => {
    const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-map-arm]");
    if (!el) {
      return;
    }
    ev.preventDefault();
    const arm = el.dataset["mapArm"] as Arm;
    dispatch({
      kind: "set_viewport", arm,
      viewport: zoom(currentViewport(arm), ev.deltaY > 0 ? 1.15 : 1 / 1.15),
    });
  }, { passive: false });

  function currentViewport(arm: Arm) {
    const cfg = bundle.scenes[0]?.config as { radius_km: number };
    return state.interaction.viewports[arm]
      ?? defaultViewport(bundle.data.actor_slices[arm], cfg.radius_km, PANEL);
  }

  window.addEventListener("keydown", (ev) => {
    if (overlay) {
      if (ev.key === "Escape" || ev.key === "Enter") {
        overlay = null;
        render();
      }
      return;
    }
    if (ev.key === "ArrowRight" || ev.key === " ") {
      dispatch({ kind: "next_animated" });
    } else if (ev.key === "ArrowLeft") {
      dispatch({ kind: "back" });
    } else if (ev.key === "Enter") {
      dispatch({ kind: "fast_forward" });
    }
  });

  render();
}

loadBundle().then(start).catch((err) => {
  const root = document.getElementById("app");
  if (root) {
    root.innerHTML = `<div class="loaderror">
      <h1>Could not load the story</h1><p>${String(err)}</p>
      <p>Pass a bundle with <code>?bundle=&lt;url&gt;</code>.</p></div>`;
  }
});
