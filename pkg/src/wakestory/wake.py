"""Pre/post dependent-event counts and the pre-intervention trend.

Day offsets are event date minus intervention date. Day 0 belongs to neither
side: at day resolution the causal order of a same-day event is undefined.
The pre window [-T, -1] splits into an early half [-T, -T/2 - 1] and a recent
half [-T/2, -1]; trend = n_recent - n_early. T must be even so the halves have
equal width, otherwise the statistic would lean toward the longer half.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

from . import errors
from .dataset import Dataset, InterventionEvent
from .geo import SpatialIndex, build_index, query_radius_with_distance


@dataclass(frozen=True, order=True)
class WindowSpec:
    radius_km: float
    half_width_days: int


@dataclass(frozen=True)
class WindowGrid:
    radii: tuple[float, ...]
    half_widths: tuple[int, ...]

    @property
    def t_max(self) -> int:
        return self.half_widths[-1]

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    def cells(self) -> list[WindowSpec]:
        """All windows, radii-major."""
        return [WindowSpec(r, t) for r in self.radii for t in self.half_widths]


def make_grid(radii: list[float], half_widths: list[int]) -> WindowGrid:
    if not radii or not half_widths:
        raise errors.BadGrid("grid needs at least one radius and one half-width")
    if any(not math.isfinite(r) or r <= 0 for r in radii):
        raise errors.BadGrid("radii must be positive and finite")
    if any(radii[i] >= radii[i + 1] for i in range(len(radii) - 1)):
        raise errors.BadGrid("radii must be strictly increasing")
    for t in half_widths:
        if not isinstance(t, int) or t < 2 or t % 2 != 0:
            raise errors.OddHalfWidth(t)
    if any(half_widths[i] >= half_widths[i + 1] for i in range(len(half_widths) - 1)):
        raise errors.BadGrid("half-widths must be strictly increasing")
    return WindowGrid(radii=tuple(float(r) for r in radii),
                      half_widths=tuple(half_widths))


@dataclass(frozen=True)
class Wake:
    intervention_id: str
    window: WindowSpec
    n_pre: int
    n_post: int
    trend: int
    offsets: tuple[int, ...]  # sorted day offsets of the counted events


def day_offset(event_date: date, intervention_date: date) -> int:
    return event_date.toordinal() - intervention_date.toordinal()


def window_counts(offsets, t: int) -> tuple[int, int, int, int, int]:
    """(n_pre, n_post, n_early, n_recent, trend) for a window of half-width t.

    Offsets outside [-t, t] and day 0 are ignored, so the function can run on
    any superset of the window — clients recompute over a drag range from one
    embedded list with this exact rule.
    """
    half = t // 2
    n_pre = n_post = n_early = n_recent = 0
    for o in offsets:
        if -t <= o <= -1:
            n_pre += 1
            if o <= -half - 1:
                n_early += 1
            else:
                n_recent += 1
        elif 1 <= o <= t:
            n_post += 1
    return n_pre, n_post, n_early, n_recent, n_recent - n_early


def compute_wake(iv: InterventionEvent, index: SpatialIndex, w: WindowSpec) -> Wake:
    """Count dependent events within w around one intervention."""
    hits = query_radius_with_distance(index, iv.loc, w.radius_km)
    offsets = []
    for id_, _dist in hits:
        o = day_offset(index.by_id[id_].date, iv.date)
        if o != 0 and -w.half_width_days <= o <= w.half_width_days:
            offsets.append(o)
    offsets.sort()
    n_pre, n_post, _, _, trend = window_counts(offsets, w.half_width_days)
    return Wake(intervention_id=iv.id, window=w, n_pre=n_pre, n_post=n_post,
                trend=trend, offsets=tuple(offsets))


def compute_wakes_grid(ds: Dataset, grid: WindowGrid) -> dict[WindowSpec, list[Wake]]:
    """One Wake per intervention per grid cell; lists follow intervention order.

    Each intervention is queried once at the widest radius; narrower cells
    filter the (distance, offset) pairs, which is exactly the per-cell count.
    """
    index = build_index(list(ds.dependents), grid.r_max)
    out: dict[WindowSpec, list[Wake]] = {w: [] for w in grid.cells()}
    t_max = grid.t_max

    for iv in ds.interventions:
        pairs = []  # (distance_km, offset) within the widest window
        for id_, dist in query_radius_with_distance(index, iv.loc, grid.r_max):
            o = day_offset(index.by_id[id_].date, iv.date)
            if o != 0 and -t_max <= o <= t_max:
                pairs.append((dist, o))
        for w in out:
            offsets = sorted(
                o for dist, o in pairs
                if dist <= w.radius_km and -w.half_width_days <= o <= w.half_width_days
            )
            n_pre, n_post, _, _, trend = window_counts(offsets, w.half_width_days)
            out[w].append(Wake(intervention_id=iv.id, window=w, n_pre=n_pre,
                               n_post=n_post, trend=trend, offsets=tuple(offsets)))
    return out
