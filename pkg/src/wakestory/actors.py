"""Selection of the exemplar treatment/control pair that anchors the story.

Candidates are cross-arm pairs inside one matched stratum at the reference
window (the grid's median cell). Hard constraints keep the examples usable:

  H1  both interventions share a matched stratum at the reference window
  H2  neither is truncated at the widest half-width (the drag range in the
      trend scene must be fully defined)
  H3  both have n_pre >= 1 and n_post >= 1 at the reference window

Passing pairs score 2*readability(t) + 2*readability(c) + trend_similarity;
readability is 1 inside the 3..30 total-count band and decays by gap/30
outside it, and trend_similarity = 1 - |dt - dc| / (1 + max(|dt|, |dc|)),
both clamped at 0. Ties break lexicographically on (treatment_id, control_id).
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import DEFAULT_ACTOR_WEIGHTS, Dataset
from .errors import NoActors
from .matching import MatchResult
from .wake import Wake, WindowGrid, WindowSpec


@dataclass(frozen=True)
class ActorPair:
    treatment_id: str
    control_id: str
    reference_window: WindowSpec
    score: float
    report: tuple[dict, ...]


def reference_window(grid: WindowGrid) -> WindowSpec:
    """Median radius and half-width; even-length lists take the lower median."""
    r = grid.radii[(len(grid.radii) - 1) // 2]
    t = grid.half_widths[(len(grid.half_widths) - 1) // 2]
    return WindowSpec(r, t)


def readability(wake: Wake) -> float:
    total = wake.n_pre + wake.n_post
    if 3 <= total <= 30:
        return 1.0
    gap = 3 - total if total < 3 else total - 30
    return max(0.0, 1.0 - gap / 30.0)


def trend_similarity(t: Wake, c: Wake) -> float:
    spread = abs(t.trend - c.trend) / (1.0 + max(abs(t.trend), abs(c.trend)))
    return max(0.0, 1.0 - spread)


def score_pair(t: Wake, c: Wake,
               weights: tuple[float, float, float] = DEFAULT_ACTOR_WEIGHTS) -> float:
    w_rt, w_rc, w_ts = weights
    return w_rt * readability(t) + w_rc * readability(c) + w_ts * trend_similarity(t, c)


def _pair_report(t: Wake, c: Wake, ds: Dataset, sig: tuple[int, ...],
                 weights: tuple[float, float, float]) -> tuple[dict, ...]:
    return (
        {"constraint": "same_matched_stratum", "passed": True,
         "value": list(sig)},
        {"constraint": "not_truncated", "passed": True,
         "value": {"treatment": t.intervention_id not in ds.truncated,
                   "control": c.intervention_id not in ds.truncated}},
        {"constraint": "min_counts", "passed": True,
         "value": {"treatment": {"n_pre": t.n_pre, "n_post": t.n_post},
                   "control": {"n_pre": c.n_pre, "n_post": c.n_post}}},
        {"constraint": "readability_treatment", "passed": None, "value": readability(t)},
        {"constraint": "readability_control", "passed": None, "value": readability(c)},
        {"constraint": "trend_similarity", "passed": None, "value": trend_similarity(t, c)},
        {"constraint": "weights", "passed": None, "value": list(weights)},
    )


def select_actors(
    ds: Dataset,
    grid: WindowGrid,
    wakes: list[Wake],
    match_ref: MatchResult,
    weights: tuple[float, float, float] = DEFAULT_ACTOR_WEIGHTS,
) -> ActorPair:
    """Argmax-scoring admissible pair at the reference window.

    Raises NoActors (with a diagnosis of where candidates died) when no pair
    passes H1-H3.
    """
    ref = reference_window(grid)
    if match_ref.window != ref:
        raise ValueError("match result is not at the reference window")
    by_id = {w.intervention_id: w for w in wakes}

    n_pairs = 0
    n_fail_truncated = 0
    n_fail_counts = 0
    best: tuple[float, str, str] | None = None
    best_key: tuple[str, str] | None = None

    for stratum in match_ref.strata:
        if not stratum.matched:
            continue
        for t_id in stratum.treated_ids:
            for c_id in stratum.control_ids:
                n_pairs += 1
                if t_id in ds.truncated or c_id in ds.truncated:
                    n_fail_truncated += 1
                    continue
                t, c = by_id[t_id], by_id[c_id]
                if t.n_pre < 1 or t.n_post < 1 or c.n_pre < 1 or c.n_post < 1:
                    n_fail_counts += 1
                    continue
                score = score_pair(t, c, weights)
                key = (t_id, c_id)
                if best is None or score > best[0] or (score == best[0] and key < best_key):
                    best = (score, t_id, c_id)
                    best_key = key

    if best is None:
        raise NoActors({
            "reference_window": {"radius_km": ref.radius_km,
                                 "half_width_days": ref.half_width_days},
            "matched_strata": sum(1 for s in match_ref.strata if s.matched),
            "pairs_in_matched_strata": n_pairs,
            "failed_truncation": n_fail_truncated,
            "failed_min_counts": n_fail_counts,
        })

    score, t_id, c_id = best
    return ActorPair(
        treatment_id=t_id,
        control_id=c_id,
        reference_window=ref,
        score=score,
        report=_pair_report(by_id[t_id], by_id[c_id], ds,
                            match_ref.signatures[t_id], weights),
    )
