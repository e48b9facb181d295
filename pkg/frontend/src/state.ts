/** Viewer state machine.
 *
 * Every transition is a pure function of (state, action, bundle); actions at
 * the bounds are no-ops, so any action sequence stays in the valid space.
 * Interaction state is scene-local and resets when the scene changes.
 */

import { clampHalfWidth } from "./trend.js";
import type { Arm, Bundle } from "./types.js";

export interface Viewport {
  lon: number;
  lat: number;
  kmPerPx: number;
}

export interface InteractionState {
  halfWidth: number;
  matchedOnly: boolean;
  filters: Record<string, [number, number]>;
  viewports: Partial<Record<Arm, Viewport>>;
  hoveredCell: number | null;
}

export interface ViewerState {
  scene: number;
  shot: number;
  animating: boolean;
  interaction: InteractionState;
}

export type NavAction =
  | { kind: "next_animated" }
  | { kind: "fast_forward" }
  | { kind: "back" }
  | { kind: "jump"; scene: number; shot: number };

export type UiAction =
  | { kind: "set_half_width"; halfWidth: number }
  | { kind: "toggle_matched_only" }
  | { kind: "set_filter"; variable: string; lo: number; hi: number }
  | { kind: "clear_filters" }
  | { kind: "set_viewport"; arm: Arm; viewport: Viewport }
  | { kind: "hover_cell"; cell: number | null };

export type Action = NavAction | UiAction;

export function defaultInteraction(bundle: Bundle): InteractionState {
  return {
    halfWidth: bundle.data.trend_bins.default.half_width,
    matchedOnly: false,
    filters: {},
    viewports: {},
    hoveredCell: null,
  };
}

export function initialState(bundle: Bundle): ViewerState {
  return { scene: 0, shot: 0, animating: false, interaction: defaultInteraction(bundle) };
}

function shotCount(bundle: Bundle, scene: number): number {
  return bundle.scenes[scene]?.shots.length ?? 0;
}

function at(state: ViewerState, bundle: Bundle, scene: number, shot: number,
            animating: boolean): ViewerState {
  const interaction =
    scene === state.scene ? state.interaction : defaultInteraction(bundle);
  return { scene, shot, animating, interaction };
}

export function navigate(state: ViewerState, action: NavAction,
                         bundle: Bundle): ViewerState {
  const last = shotCount(bundle, state.scene) - 1;
  switch (action.kind) {
    case "next_animated":
    case "fast_forward": {
      const animated = action.kind === "next_animated";
      if (action.kind === "fast_forward" && state.animating) {
        return { ...state, animating: false }; // complete the running animation
      }
      if (state.shot < last) {
        return at(state, bundle, state.scene, state.shot + 1, animated);
      }
      if (state.scene < bundle.scenes.length - 1) {
        return at(state, bundle, state.scene + 1, 0, animated);
      }
      return state; // already at the final shot
    }
    case "back": {
      if (state.shot > 0) {
        return at(state, bundle, state.scene, state.shot - 1, false);
      }
      if (state.scene > 0) {
        const prev = state.scene - 1;
        return at(state, bundle, prev, shotCount(bundle, prev) - 1, false);
      }
      return state;
    }
    case "jump": {
      const { scene, shot } = action;
      if (!Number.isInteger(scene) || !Number.isInteger(shot)) {
        return state;
      }
      if (scene < 0 || scene >= bundle.scenes.length) {
        return state;
      }
      if (shot < 0 || shot >= shotCount(bundle, scene)) {
        return state;
      }
      return at(state, bundle, scene, shot, false);
    }
  }
}

export function update(state: ViewerState, action: Action,
                       bundle: Bundle): ViewerState {
  switch (action.kind) {
    case "next_animated":
    case "fast_forward":
    case "back":
    case "jump":
      return navigate(state, action, bundle);
    case "set_half_width": {
      const halfWidth = clampHalfWidth(bundle, action.halfWidth);
      return { ...state, interaction: { ...state.interaction, halfWidth } };
    }
    case "toggle_matched_only":
      return {
        ...state,
        interaction: { ...state.interaction, matchedOnly: !state.interaction.matchedOnly },
      };
    case "set_filter": {
      if (!Number.isFinite(action.lo) || !Number.isFinite(action.hi)) {
        return state;
      }
      const lo = Math.min(action.lo, action.hi);
      const hi = Math.max(action.lo, action.hi);
      const filters = { ...state.interaction.filters, [action.variable]: [lo, hi] as [number, number] };
      return { ...state, interaction: { ...state.interaction, filters } };
    }
    case "clear_filters":
      return { ...state, interaction: { ...state.interaction, filters: {} } };
    case "set_viewport": {
      const viewports = { ...state.interaction.viewports, [action.arm]: action.viewport };
      return { ...state, interaction: { ...state.interaction, viewports } };
    }
    case "hover_cell": {
      const n = bundle.data.heatmap.cells.length;
      const cell =
        action.cell !== null && Number.isInteger(action.cell)
        && action.cell >= 0 && action.cell < n ? action.cell : null;
      return { ...state, interaction: { ...state.interaction, hoveredCell: cell } };
    }
  }
}

export function isValid(state: ViewerState, bundle: Bundle): boolean {
  if (state.scene < 0 || state.scene >= bundle.scenes.length) {
    return false;
  }
  if (state.shot < 0 || state.shot >= shotCount(bundle, state.scene)) {
    return false;
  }
  const tb = bundle.data.trend_bins;
  const t = state.interaction.halfWidth;
  if (t < tb.half_width_min || t > tb.half_width_max || t % 2 !== 0) {
    return false;
  }
  const cell = state.interaction.hoveredCell;
  if (cell !== null && (cell < 0 || cell >= bundle.data.heatmap.cells.length)) {
    return false;
  }
  return true;
}
