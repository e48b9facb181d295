"""Assembly of the four-scene story bundle.

A bundle is a plain JSON document (dict all the way down): intro, four scenes
of staged shots, a resolution, embedded data slices, theme, and meta. It is
self-contained — a viewer needs nothing else except optional map tiles — and
serializes canonically, so identical inputs give identical bytes.

Shots within a scene only ever add marks (the staging invariant); the final
shot of each scene is the interactive one. Text is a list of paragraphs made
of runs; a run may carry a color role that links it to a visual mark of the
same shot through the theme.

Everything a client may recompute (trend counts, bin lookups) is derived here
from the *serialized* values — e.g. validity flags come from the rounded bin
edges — so a client working from the bundle reproduces them bit-exactly.
"""

from __future__ import annotations

import json
import math
from importlib import resources

from . import errors
from .actors import ActorPair, reference_window, select_actors
from .canonical import canonical_json_bytes, canonicalize, format_float, round_float
from .dataset import Dataset, ScenarioConfig, render_template
from .estimation import (EffectEstimate, ResultGrid, estimate_cell,
                         sweep_from_wakes)
from .geo import haversine_km
from .matching import MatchResult, bin_index
from .wake import (Wake, WindowGrid, WindowSpec, compute_wakes_grid, day_offset,
                   window_counts)

SCHEMA_VERSION = "1"

SCENE_IDS = ("wakes", "trend", "matching", "results")

DEGENERATE_TEXT = "insufficient variation to estimate an effect"
ALL_DEGENERATE_TEXT = "no estimable cells"


# --- text helpers ---------------------------------------------------------------

def t(text: str) -> dict:
    return {"text": text}


def tok(text: str, role: str) -> dict:
    return {"text": text, "role": role}


def block(*paragraphs: list[dict]) -> dict:
    return {"paragraphs": [list(p) for p in paragraphs]}


def plain_text(text_block: dict) -> str:
    return " ".join(
        "".join(run["text"] for run in para) for para in text_block["paragraphs"]
    )


def _shot(shot_id: str, marks: list[dict], entering: list[str], text: dict,
          interactive: bool = False) -> dict:
    return {
        "id": shot_id,
        "view_state": {"marks": [dict(m) for m in marks]},
        "text": text,
        "entering_marks": list(entering),
        "interactive": interactive,
    }


def _staged_shots(scene_id: str, stages: list[tuple[list[dict], dict]]) -> list[dict]:
    """Accumulate marks stage by stage; the last shot is interactive."""
    shots = []
    marks: list[dict] = []
    for i, (added, text) in enumerate(stages):
        marks = marks + added
        shots.append(_shot(
            f"{scene_id}-{i + 1}",
            marks,
            [m["id"] for m in added],
            text,
            interactive=(i == len(stages) - 1),
        ))
    return shots


# --- automatic interpretation ------------------------------------------------------

def significance_clause(p: float) -> str:
    word = "statistically significant" if p < 0.05 else "not statistically significant"
    return f"{word}, p = {p:.3f}"


def interpret_effect(e: EffectEstimate, w: WindowSpec, cfg: ScenarioConfig) -> dict:
    """One-paragraph reading of a cell, in the scenario's own vocabulary."""
    if e.degenerate:
        return block([t(f"This window provides {DEGENERATE_TEXT}: "
                        f"every matched comparison is either one-sided or exactly tied.")])
    units = render_template(cfg.effect_units_phrase, cfg)
    where = f"within {format_float(w.radius_km)} km and {w.half_width_days} days"
    clause = significance_clause(e.p_value)
    if e.estimate == 0.0:
        return block([t(
            f"{cfg.treatment_label} are associated with no estimated difference in "
            f"{cfg.dependent_label} {units} {where} ({clause})"
        )])
    direction = "more" if e.estimate > 0 else "fewer"
    role = "positive" if e.estimate > 0 else "negative"
    magnitude = f"{abs(e.estimate):.2f}"
    return block([
        t(f"{cfg.treatment_label} are associated with "),
        tok(f"{magnitude} {direction} {cfg.dependent_label}", role),
        t(f" {units} {where} ({clause})"),
    ])


def scene_summaries(cfg: ScenarioConfig) -> dict[str, str]:
    return {
        "wakes": (f"Counting {cfg.dependent_label} around each intervention: a fixed "
                  f"radius and a day window capture activity before and after."),
        "trend": ("A background level that was already rising or falling would bias any "
                  "before/after comparison; the pre-window trend measures that dynamic."),
        "matching": ("A potential selection bias is prevented with statistical matching: "
                     "only interventions under similar conditions are compared."),
        "results": ("Window sizes are a free choice, so the estimate is recomputed for "
                    "every radius and half-width combination and compared."),
    }


def build_intro(cfg: ScenarioConfig) -> dict:
    summaries = scene_summaries(cfg)
    return {
        "hook": render_template(cfg.hook_question, cfg),
        "background": cfg.background,
        "outline": [summaries[s] for s in SCENE_IDS],
    }


# --- data slices ----------------------------------------------------------------------

def _actor_slice(actor_id: str, ds: Dataset, slice_radius: float, t_max: int) -> dict:
    iv = next(i for i in ds.interventions if i.id == actor_id)
    events = []
    for e in ds.dependents:
        d = haversine_km(iv.loc, e.loc)
        if d > slice_radius:
            continue
        o = day_offset(e.date, iv.date)
        if abs(o) > t_max:
            continue
        events.append({"id": e.id, "lon": e.loc.lon, "lat": e.loc.lat,
                       "offset": o, "distance_km": d})
    events.sort(key=lambda ev: (ev["offset"], ev["id"]))
    return {
        "id": iv.id,
        "date": iv.date.isoformat(),
        "lon": iv.loc.lon,
        "lat": iv.loc.lat,
        "events": events,
    }


def _trend_offsets(slice_doc: dict, r_ref: float) -> list[int]:
    return sorted(
        ev["offset"] for ev in slice_doc["events"]
        if ev["distance_km"] <= r_ref and ev["offset"] != 0
    )


def _counts_doc(offsets: list[int], half_width: int) -> dict:
    n_pre, n_post, _, _, trend = window_counts(offsets, half_width)
    return {"n_pre": n_pre, "n_post": n_post, "trend": trend}


def build_trend_data(pair: ActorPair, slices: dict, match_ref: MatchResult,
                     grid: WindowGrid) -> dict:
    """Scene-2 payload: offsets, rounded bin edges, and the invalid half-widths.

    Validity is recomputed from the canonical (serialized) edges so a client
    reading the bundle lands in the same bins.
    """
    ref = pair.reference_window
    trend_bin = next(b for b in match_ref.bins if b.name == "trend")
    edges = [round_float(e) for e in trend_bin.edges]

    offsets = {
        "treatment": _trend_offsets(slices["treatment"], ref.radius_km),
        "control": _trend_offsets(slices["control"], ref.radius_km),
    }
    invalid = []
    for half in range(2, grid.t_max + 1, 2):
        bins = []
        for arm in ("treatment", "control"):
            _, _, _, _, trend = window_counts(offsets[arm], half)
            bins.append(bin_index(tuple(edges), float(trend)))
        if bins[0] != bins[1]:
            invalid.append(half)

    return {
        "edges": edges,
        "offsets": offsets,
        "default": {
            "half_width": ref.half_width_days,
            "treatment": _counts_doc(offsets["treatment"], ref.half_width_days),
            "control": _counts_doc(offsets["control"], ref.half_width_days),
        },
        "half_width_min": 2,
        "half_width_max": grid.t_max,
        "invalid_half_widths": invalid,
    }


def build_covariate_table(match_ref: MatchResult, wakes_ref: list[Wake],
                          ds: Dataset) -> dict:
    by_id = {w.intervention_id: w for w in wakes_ref}
    variables = [
        {"name": b.name, "kind": b.kind.value, "edges": [round_float(e) for e in b.edges]}
        for b in match_ref.bins
    ]
    rows = []
    for iv in ds.interventions:
        wk = by_id[iv.id]
        rows.append({
            "id": iv.id,
            "arm": iv.arm.value,
            "values": {name: v for name, v in zip(ds.schema.names, iv.covariates)},
            "n_pre": wk.n_pre,
            "trend": wk.trend,
            "matched": match_ref.matched[iv.id],
            "signature": list(match_ref.signatures[iv.id]),
        })
    return {
        "variables": variables,
        "rows": rows,
        "matched_totals": {"treatment": match_ref.m_t, "control": match_ref.m_c},
    }


def side_fraction(p: float) -> float:
    scaled = -math.log10(max(p, 1e-6)) / 3.0
    return 0.4 + 0.6 * min(max(scaled, 0.0), 1.0)


def build_heatmap_data(results: ResultGrid) -> dict:
    live = [abs(e.estimate) for e in results.cells.values() if not e.degenerate]
    all_degenerate = not live
    m = max(live) if live else 1.0
    cells = []
    for w in results.windows():
        e = results.cells[w]
        cells.append({
            "radius_km": w.radius_km,
            "half_width_days": w.half_width_days,
            "estimate": e.estimate,
            "std_error": e.std_error,
            "p_value": e.p_value,
            "n_matched_t": e.n_matched_t,
            "n_matched_c": e.n_matched_c,
            "degenerate": e.degenerate,
            "side_fraction": side_fraction(e.p_value),
        })
    return {
        "radii": list(results.radii),
        "half_widths": list(results.half_widths),
        "cells": cells,
        "color_domain": [-m, m],
        "all_degenerate": all_degenerate,
    }


# --- scenes -----------------------------------------------------------------------

def build_scene_wakes(pair: ActorPair, wakes_ref: list[Wake], ds: Dataset,
                      cfg: ScenarioConfig, grid: WindowGrid) -> dict:
    ref = pair.reference_window
    by_id = {w.intervention_id: w for w in wakes_ref}
    wt, wc = by_id[pair.treatment_id], by_id[pair.control_id]
    r_txt = format_float(ref.radius_km)
    days = ref.half_width_days

    def panel_marks(arm: str, short: str, role: str) -> dict[str, list[dict]]:
        return {
            "pre": [
                {"id": f"{short}-pre-panel", "type": "map_panel", "arm": arm, "phase": "pre"},
                {"id": f"{short}-pre-circle", "type": "dashed_circle",
                 "panel": f"{short}-pre-panel", "radius_km": ref.radius_km, "color_role": role},
                {"id": f"{short}-pre-events", "type": "event_dots",
                 "panel": f"{short}-pre-panel", "color_role": "dependent"},
            ],
            "post": [
                {"id": f"{short}-post-panel", "type": "map_panel", "arm": arm, "phase": "post"},
                {"id": f"{short}-post-circle", "type": "dashed_circle",
                 "panel": f"{short}-post-panel", "radius_km": ref.radius_km, "color_role": role},
                {"id": f"{short}-post-events", "type": "event_dots",
                 "panel": f"{short}-post-panel", "color_role": "dependent"},
            ],
            "mid": [
                {"id": f"{short}-mid-panel", "type": "map_panel", "arm": arm,
                 "phase": "intervention"},
                {"id": f"{short}-mid-marker", "type": "intervention_marker",
                 "panel": f"{short}-mid-panel", "color_role": role},
            ],
            "timeline": [
                {"id": f"{short}-timeline", "type": "timeline", "arm": arm,
                 "color_role": "dependent"},
            ],
        }

    tm = panel_marks("treatment", "t", "treatment")
    cm = panel_marks("control", "c", "control")

    stages = [
        (tm["pre"], block(
            [tok(cfg.treatment_label, "treatment"),
             t(" are the interventions whose effect is in question. The story follows one of"
               " them, picked from the data itself rather than invented."),
             ],
            [t(f"The map shows the {days} days before it. Each dot is one of the "),
             tok(cfg.dependent_label, "dependent"),
             t(f"; the dashed circle marks {r_txt} km around the intervention site."
               f" {wt.n_pre} fall inside."),
             ])),
        (tm["post"] + tm["timeline"], block(
            [t(f"A second map adds the {days} days after: now "),
             tok(f"{wt.n_post} of the {cfg.dependent_label}", "dependent"),
             t(" lie inside the circle."),
             ],
            [t("The timeline underneath places every one of these events by its day"
               " offset from the intervention."),
             ])),
        (tm["mid"], block(
            [t("Between the two sits day 0: the "),
             tok("intervention itself", "treatment"),
             t(". Events on that exact day belong to neither side; at day resolution"
               " their order against the intervention is undefined, so they are never"
               " counted."),
             ])),
        (cm["pre"] + cm["mid"] + cm["post"] + cm["timeline"], block(
            [t("A count alone proves nothing. "),
             tok(cfg.control_label, "control"),
             t(" provide the comparison: the same three views repeat for a matching"
               f" control intervention, with {wc.n_pre} of the "),
             tok(cfg.dependent_label, "dependent"),
             t(f" before and {wc.n_post} after."),
             ])),
        ([{"id": "wakes-hint", "type": "interaction_hint"}], block(
            [t("Pan or zoom any map and its row follows in sync. Hovering an event"
               " shows its id, day offset, and distance from the intervention."),
             ])),
    ]
    return {
        "id": "wakes",
        "title": "Before and after each intervention",
        "summary": scene_summaries(cfg)["wakes"],
        "interaction": "synchronized_maps",
        "config": {
            "radius_km": ref.radius_km,
            "half_width_days": days,
            "slice_radius_km": 2 * ref.radius_km,
            "max_offset_days": grid.t_max,
        },
        "shots": _staged_shots("wakes", stages),
    }


def build_scene_trend(pair: ActorPair, ds: Dataset, cfg: ScenarioConfig,
                      trend_data: dict) -> dict:
    ref = pair.reference_window
    half = ref.half_width_days // 2
    d_t = trend_data["default"]["treatment"]
    d_c = trend_data["default"]["control"]
    _, _, e_t, r_t, _ = window_counts(trend_data["offsets"]["treatment"],
                                      ref.half_width_days)
    _, _, e_c, r_c, _ = window_counts(trend_data["offsets"]["control"],
                                      ref.half_width_days)

    stages = [
        ([{"id": "t-strip", "type": "offset_strip", "arm": "treatment",
           "color_role": "dependent"},
          {"id": "t-window", "type": "window_band", "arm": "treatment",
           "color_role": "treatment"},
          {"id": "t-counts", "type": "count_labels", "arm": "treatment"}], block(
            [t("The same events, flattened to their day offsets. For the "),
             tok("treatment intervention", "treatment"),
             t(f": {d_t['n_pre']} "),
             tok(cfg.dependent_label, "dependent"),
             t(f" in the {ref.half_width_days} days before, {d_t['n_post']} in the"
               f" {ref.half_width_days} days after."),
             ])),
        ([{"id": "t-halves", "type": "pre_halves", "arm": "treatment"},
          {"id": "t-trend-label", "type": "trend_annotation", "arm": "treatment",
           "color_role": "treatment"}], block(
            [t(f"Were things already moving before day 0? The pre-window splits into two"
               f" equal halves of {half} days. Early half: {e_t} events; recent half:"
               f" {r_t}. Their difference is the "),
             tok(f"trend, {d_t['trend']:+d}", "treatment"),
             t("."),
             ])),
        ([{"id": "c-strip", "type": "offset_strip", "arm": "control",
           "color_role": "dependent"},
          {"id": "c-window", "type": "window_band", "arm": "control",
           "color_role": "control"},
          {"id": "c-counts", "type": "count_labels", "arm": "control"},
          {"id": "c-halves", "type": "pre_halves", "arm": "control"},
          {"id": "c-trend-label", "type": "trend_annotation", "arm": "control",
           "color_role": "control"}], block(
            [t("The "),
             tok("control intervention", "control"),
             t(f" gets the same treatment: {d_c['n_pre']} before, {d_c['n_post']} after,"
               f" early {e_c} against recent {r_c} for a "),
             tok(f"trend of {d_c['trend']:+d}", "control"),
             t(". A pair is only comparable when the trends land close together."),
             ])),
        ([{"id": "drag-handles", "type": "drag_handles"},
          {"id": "validity-flag", "type": "validity_highlight"}], block(
            [t(f"Drag the handles to any even half-width between 2 and"
               f" {trend_data['half_width_max']} days; the counts and trends recompute as"
               " the window grows or shrinks."),
             ],
            [t("When the two trends fall into different bins of the matching grid, the"
               " display flags the pair as no longer valid for comparison."),
             ])),
    ]
    return {
        "id": "trend",
        "title": "The trend before an intervention",
        "summary": scene_summaries(cfg)["trend"],
        "interaction": "window_drag",
        "config": {"radius_km": ref.radius_km,
                   "default_half_width": ref.half_width_days},
        "shots": _staged_shots("trend", stages),
    }


def build_scene_matching(match_ref: MatchResult, wakes_ref: list[Wake], ds: Dataset,
                         cfg: ScenarioConfig) -> dict:
    names = [b.name for b in match_ref.bins]
    first, rest = names[0], names[1:]

    legend = [
        {"id": "arm-legend-t", "type": "legend_swatch", "arm": "treatment",
         "color_role": "treatment"},
        {"id": "arm-legend-c", "type": "legend_swatch", "arm": "control",
         "color_role": "control"},
    ]

    def hist(name: str) -> dict:
        return {"id": f"hist-{name}", "type": "histogram_pair", "variable": name}

    n_user = len(ds.schema.names)
    stages = [
        ([hist(first)] + legend, block(
            [t("Interventions happen under different conditions, and those conditions"
               " matter. Each matching variable gets a pair of histograms: "),
             tok(cfg.treatment_label, "treatment"),
             t(" against "),
             tok(cfg.control_label, "control"),
             t(f". This one is {first!r}; the chart title is the variable's name in the"
               " data, nothing more."),
             ])),
        ([hist(n) for n in rest], block(
            [t(f"All {len(names)} matching variables at once: {n_user} provided with the"
               " data, plus two derived from the counting itself — the pre-window level"
               " and the trend."),
             ],
            [t("The more the two distributions of a variable diverge, the fewer"
               " interventions will find a counterpart."),
             ])),
        ([{"id": "matched-overlay", "type": "matched_overlay"},
          {"id": "matched-totals", "type": "matched_totals_label"}], block(
            [t("Each variable is cut into bins; interventions match only when they share"
               f" every bin. {match_ref.m_t} "),
             tok("treatment", "treatment"),
             t(f" and {match_ref.m_c} "),
             tok("control", "control"),
             t(" interventions end up in strata holding both arms; the rest are set"
               " aside."),
             ])),
        ([{"id": "matched-toggle", "type": "matched_toggle"},
          {"id": "filter-brush", "type": "filter_brush"}], block(
            [t("Toggle the view to matched interventions only, or draw a filter on any"
               " chart: the same interventions disappear from every histogram at once."),
             ])),
    ]
    return {
        "id": "matching",
        "title": "Matching comparable interventions",
        "summary": scene_summaries(cfg)["matching"],
        "interaction": "histogram_filter",
        "config": {"variables": names},
        "shots": _staged_shots("matching", stages),
    }


def build_scene_results(results: ResultGrid, cfg: ScenarioConfig,
                        ref: WindowSpec) -> dict:
    heat = build_heatmap_data(results)
    ref_cell = results.cells[ref]
    r_txt = format_float(ref.radius_km)

    ref_mark = {"id": "heat-ref-cell", "type": "heatmap_tile",
                "radius_km": ref.radius_km, "half_width_days": ref.half_width_days}
    if not ref_cell.degenerate and ref_cell.estimate > 0:
        ref_mark["color_role"] = "positive"
    elif not ref_cell.degenerate and ref_cell.estimate < 0:
        ref_mark["color_role"] = "negative"

    if heat["all_degenerate"]:
        final_text = block(
            [t(f"The sweep produced {ALL_DEGENERATE_TEXT}: every window lacks either a"
               " matched pair or any outcome variation, so no effect can be estimated"
               " from this data.")])
    else:
        interp = interpret_effect(ref_cell, ref, cfg)
        final_text = block(
            interp["paragraphs"][0],
            [t("Hover any tile for its precise estimate, p-value and matched counts;"
               " the legend marks where the tile sits on the scale.")],
        )

    stages = [
        ([{"id": "heat-axes", "type": "heatmap_axes"}, ref_mark], block(
            [t(f"Everything so far used one window: {r_txt} km and"
               f" {ref.half_width_days} days. That choice was a convention, not a"
               " conclusion — here it is as a single tile, radius against half-width."),
             ])),
        ([{"id": "heat-tiles", "type": "heatmap_tiles"}], block(
            [t(f"The whole pipeline now repeats for every combination —"
               f" {len(heat['radii'])} radii by {len(heat['half_widths'])} half-widths —"
               " counting, matching and estimating from scratch in each cell."),
             ])),
        ([{"id": "legend-positive", "type": "legend_end", "direction": "more",
           "color_role": "positive"},
          {"id": "legend-negative", "type": "legend_end", "direction": "fewer",
           "color_role": "negative"},
          {"id": "size-note", "type": "size_encoding_note"}], block(
            [t("Color carries the estimate on a scale symmetric around zero: one end"
               " means "),
             tok(f"more {cfg.dependent_label}", "positive"),
             t(", the other "),
             tok(f"fewer {cfg.dependent_label}", "negative"),
             t(". Tile size carries significance: full size at p ≤ 0.001, shrinking"
               " to 40% as p approaches 1. Cells without an estimate stay as empty"
               " outlines."),
             ])),
        ([{"id": "results-hint", "type": "interaction_hint"}], final_text),
    ]
    return {
        "id": "results",
        "title": "Effects across window sizes",
        "summary": scene_summaries(cfg)["results"],
        "interaction": "heatmap_hover",
        "config": {
            "reference": {"radius_km": ref.radius_km,
                          "half_width_days": ref.half_width_days},
        },
        "shots": _staged_shots("results", stages),
    }


# --- bundle -----------------------------------------------------------------------

def method_summary(cfg: ScenarioConfig) -> str:
    return (
        f"The analysis compares {cfg.treatment_label} with {cfg.control_label} through"
        f" the {cfg.dependent_label} around them: events are counted in a spatial radius"
        " and a day window before and after each intervention, interventions are matched"
        " exactly on coarsened conditions (including the pre-window level and trend),"
        " and the difference in before/after changes between the two arms is the"
        " estimated effect — recomputed across a whole grid of window sizes to show how"
        " sensitive it is to that choice."
    )


def build_bundle(
    ds: Dataset,
    grid: WindowGrid,
    results: ResultGrid,
    pair: ActorPair,
    cfg: ScenarioConfig,
    wakes_by_window: dict[WindowSpec, list[Wake]] | None = None,
    match_ref: MatchResult | None = None,
) -> dict:
    """Assemble, canonicalize, and verify the full story document."""
    if wakes_by_window is None:
        wakes_by_window = compute_wakes_grid(ds, grid)
    ref = pair.reference_window
    wakes_ref = wakes_by_window[ref]
    if match_ref is None:
        _, match_ref = estimate_cell(wakes_ref, ds, cfg.cutpoints)

    slices = {
        "treatment": _actor_slice(pair.treatment_id, ds, 2 * ref.radius_km, grid.t_max),
        "control": _actor_slice(pair.control_id, ds, 2 * ref.radius_km, grid.t_max),
    }
    # round distances first: trend offsets must filter on the serialized values
    slices = canonicalize(slices)
    trend_data = build_trend_data(pair, slices, match_ref, grid)

    scenes = [
        build_scene_wakes(pair, wakes_ref, ds, cfg, grid),
        build_scene_trend(pair, ds, cfg, trend_data),
        build_scene_matching(match_ref, wakes_ref, ds, cfg),
        build_scene_results(results, cfg, ref),
    ]

    doc = {
        "schema_version": SCHEMA_VERSION,
        "intro": build_intro(cfg),
        "scenes": scenes,
        "resolution": {
            "summary": method_summary(cfg),
            "download_refs": ["results.csv", "results.json"],
            "references": list(cfg.references),
        },
        "data": {
            "actor_slices": slices,
            "trend_bins": trend_data,
            "covariate_table": build_covariate_table(match_ref, wakes_ref, ds),
            "heatmap": build_heatmap_data(results),
        },
        "theme": dict(cfg.color_theme),
        "meta": {
            "seed": cfg.seed,
            "labels": {
                "treatment": cfg.treatment_label,
                "control": cfg.control_label,
                "dependent": cfg.dependent_label,
                "region": cfg.region_name,
            },
            "data_source": cfg.data_source,
            "tile_url_template": cfg.tile_url_template,
            "actors": {"treatment": pair.treatment_id, "control": pair.control_id,
                       "score": pair.score},
        },
    }
    doc = canonicalize(doc)
    verify_bundle(doc)
    return doc


def generate_story(ds: Dataset, grid: WindowGrid,
                   cfg: ScenarioConfig) -> tuple[dict, ResultGrid]:
    """Full pipeline: wakes, sweep, actor selection, bundle."""
    wakes_by_window = compute_wakes_grid(ds, grid)
    results = sweep_from_wakes(wakes_by_window, ds, grid, cfg.cutpoints)
    ref = reference_window(grid)
    _, match_ref = estimate_cell(wakes_by_window[ref], ds, cfg.cutpoints)
    pair = select_actors(ds, grid, wakes_by_window[ref], match_ref, cfg.actor_weights)
    bundle = build_bundle(ds, grid, results, pair, cfg, wakes_by_window, match_ref)
    return bundle, results


# --- serialization and checks ----------------------------------------------------------

def serialize_bundle(doc: dict) -> bytes:
    return canonical_json_bytes(doc)


def parse_bundle(data: bytes) -> dict:
    return json.loads(data.decode("utf-8"))


def bundle_schema() -> dict:
    text = resources.files("wakestory.schemas").joinpath(
        "bundle.schema.v1.json").read_text("utf-8")
    return json.loads(text)


class BundleIntegrityError(errors.WakestoryError):
    pass


def verify_bundle(doc: dict) -> None:
    """Structural checks: scene arc, staging, color-token integrity.

    Raises BundleIntegrityError; schema validation is the test suite's job.
    """
    if [s["id"] for s in doc["scenes"]] != list(SCENE_IDS):
        raise BundleIntegrityError("scene order must be wakes, trend, matching, results")
    if len(doc["intro"]["outline"]) != 4:
        raise BundleIntegrityError("intro outline must have four entries")
    theme = doc["theme"]
    for scene in doc["scenes"]:
        if not scene["shots"]:
            raise BundleIntegrityError(f"scene {scene['id']} has no shots")
        if not scene["shots"][-1]["interactive"]:
            raise BundleIntegrityError(f"scene {scene['id']} must end interactive")
        prev_ids: set[str] = set()
        prev_marks: dict[str, dict] = {}
        for shot in scene["shots"]:
            marks = shot["view_state"]["marks"]
            ids = {m["id"] for m in marks}
            if len(ids) != len(marks):
                raise BundleIntegrityError(f"duplicate mark id in {shot['id']}")
            if not prev_ids <= ids:
                raise BundleIntegrityError(
                    f"staging violated in {shot['id']}: marks may only be added")
            for m in marks:
                if m["id"] in prev_marks and prev_marks[m["id"]] != m:
                    raise BundleIntegrityError(
                        f"mark {m['id']} changed between shots of {scene['id']}")
            entering = set(shot["entering_marks"])
            if entering != ids - prev_ids:
                raise BundleIntegrityError(
                    f"entering_marks of {shot['id']} do not match the added marks")
            roles = {m["color_role"] for m in marks if "color_role" in m}
            for para in shot["text"]["paragraphs"]:
                for run in para:
                    role = run.get("role")
                    if role is None:
                        continue
                    if role not in theme:
                        raise BundleIntegrityError(
                            f"text role {role!r} in {shot['id']} missing from theme")
                    if role not in roles:
                        raise BundleIntegrityError(
                            f"text role {role!r} in {shot['id']} has no matching mark")
            prev_ids = ids
            prev_marks = {m["id"]: m for m in marks}
