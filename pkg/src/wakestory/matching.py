"""Coarsened exact matching on covariates plus the derived pre-level and trend.

Continuous variables coarsen into k = ceil(log2(n) + 1) equal-width bins
(Sturges), binary variables keep identity bins. Bins are half-open
[e_i, e_{i+1}) with the final bin closed at the top; values outside the edge
range clamp into the boundary bins. The same rule ships in the story bundle so
a client can reproduce bin indices bit-exactly from the edges.

A stratum is matched when it holds both arms. Matched treated events weigh 1;
a matched control in stratum s weighs (m_T^s / m_C^s) * (M_C / M_T), which
makes the control weights sum to M_C.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from . import errors
from .dataset import Arm, CovariateSchema, InterventionEvent, Kind
from .wake import Wake, WindowSpec

DERIVED_PRE = "n_pre"
DERIVED_TREND = "trend"


@dataclass(frozen=True)
class BinAssignment:
    name: str
    kind: Kind
    edges: tuple[float, ...]  # ascending; (0, 1) for binary
    indices: tuple[int, ...]  # one bin index per intervention


@dataclass(frozen=True)
class Stratum:
    signature: tuple[int, ...]
    treated_ids: tuple[str, ...]
    control_ids: tuple[str, ...]

    @property
    def matched(self) -> bool:
        return bool(self.treated_ids) and bool(self.control_ids)


@dataclass(frozen=True)
class MatchResult:
    window: WindowSpec
    strata: tuple[Stratum, ...]
    matched: dict[str, bool]
    weights: dict[str, float]
    m_t: int
    m_c: int
    bins: tuple[BinAssignment, ...]
    signatures: dict[str, tuple[int, ...]]


def sturges_bins(n_total: int) -> int:
    return max(1, math.ceil(math.log2(n_total) + 1)) if n_total > 0 else 1


def bin_index(edges: tuple[float, ...], value: float) -> int:
    """Index of the half-open bin holding value; clamps at both ends."""
    k = len(edges) - 1
    if k <= 0:
        return 0
    i = bisect_right(edges, value) - 1
    return min(max(i, 0), k - 1)


def coarsen(
    name: str,
    values: list[float],
    kind: Kind,
    n_total: int,
    cutpoints: tuple[float, ...] | None = None,
) -> BinAssignment:
    if kind is Kind.BINARY:
        return BinAssignment(name=name, kind=kind, edges=(0.0, 1.0),
                             indices=tuple(int(v) for v in values))
    if cutpoints is not None:
        edges = tuple(float(e) for e in cutpoints)
        return BinAssignment(name=name, kind=kind, edges=edges,
                             indices=tuple(bin_index(edges, v) for v in values))
    lo, hi = min(values), max(values)
    if lo == hi:
        edges = (lo, hi)  # constant column: one bin holds everything
        return BinAssignment(name=name, kind=kind, edges=edges,
                             indices=(0,) * len(values))
    k = sturges_bins(n_total)
    edges = tuple(lo + i * (hi - lo) / k for i in range(k + 1))
    return BinAssignment(name=name, kind=kind, edges=edges,
                         indices=tuple(bin_index(edges, v) for v in values))


def match_cem(
    wakes: list[Wake],
    interventions: list[InterventionEvent],
    schema: CovariateSchema,
    cutpoints: dict[str, tuple[float, ...]] | None = None,
) -> MatchResult:
    """Exact matching on coarsened signatures at one window.

    The signature is (user covariates..., n_pre bin, trend bin). n_pre and
    trend always coarsen with the continuous rule: they are ordinal counts,
    whatever their observed support.
    """
    if not wakes or len(wakes) != len(interventions):
        raise ValueError("need exactly one wake per intervention")
    by_id = {w.intervention_id: w for w in wakes}
    if set(by_id) != {iv.id for iv in interventions}:
        raise ValueError("wake ids do not match intervention ids")
    window = wakes[0].window
    if any(w.window != window for w in wakes):
        raise ValueError("wakes span multiple windows")

    cutpoints = cutpoints or {}
    known = set(schema.names) | {DERIVED_PRE, DERIVED_TREND}
    unknown = set(cutpoints) - known
    if unknown:
        raise errors.ConfigError(f"cutpoints name unknown variables: {sorted(unknown)}")

    n = len(interventions)
    bins: list[BinAssignment] = []
    for j, (name, kind) in enumerate(zip(schema.names, schema.kinds)):
        values = [iv.covariates[j] for iv in interventions]
        bins.append(coarsen(name, values, kind, n, cutpoints.get(name)))
    pre_values = [float(by_id[iv.id].n_pre) for iv in interventions]
    trend_values = [float(by_id[iv.id].trend) for iv in interventions]
    bins.append(coarsen(DERIVED_PRE, pre_values, Kind.CONTINUOUS, n,
                        cutpoints.get(DERIVED_PRE)))
    bins.append(coarsen(DERIVED_TREND, trend_values, Kind.CONTINUOUS, n,
                        cutpoints.get(DERIVED_TREND)))

    signatures: dict[str, tuple[int, ...]] = {}
    groups: dict[tuple[int, ...], tuple[list[str], list[str]]] = {}
    for i, iv in enumerate(interventions):
        sig = tuple(b.indices[i] for b in bins)
        signatures[iv.id] = sig
        treated, control = groups.setdefault(sig, ([], []))
        (treated if iv.arm is Arm.TREATMENT else control).append(iv.id)

    strata = tuple(
        Stratum(signature=sig, treated_ids=tuple(t), control_ids=tuple(c))
        for sig, (t, c) in sorted(groups.items())
    )

    m_t = sum(len(s.treated_ids) for s in strata if s.matched)
    m_c = sum(len(s.control_ids) for s in strata if s.matched)

    matched = {iv.id: False for iv in interventions}
    weights = {iv.id: 0.0 for iv in interventions}
    for s in strata:
        if not s.matched:
            continue
        for id_ in s.treated_ids:
            matched[id_] = True
            weights[id_] = 1.0
        w_c = (len(s.treated_ids) / len(s.control_ids)) * (m_c / m_t)
        for id_ in s.control_ids:
            matched[id_] = True
            weights[id_] = w_c

    return MatchResult(window=window, strata=strata, matched=matched,
                       weights=weights, m_t=m_t, m_c=m_c, bins=tuple(bins),
                       signatures=signatures)
