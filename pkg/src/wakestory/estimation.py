"""Weighted difference-in-differences per window, swept over the whole grid.

The outcome per matched intervention is y = n_post - n_pre; the effect is the
slope of a weighted least-squares fit of y on intercept + treated. With a
binary regressor the fit is closed-form: the slope is the difference of
weighted arm means, and

    Var(b1) = s^2 * W / (W_t * W_c),   s^2 = sum(w e^2) / (N - 2)

with W_t, W_c the arm weight totals and W their sum. Standard errors are the
classical ones (df = N - 2), reproducible to the last bit.

Degenerate cells (an arm missing, N <= 2, or an exact fit) carry a flag
instead of crashing: p is 0 when the slope is nonzero and 1 otherwise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .canonical import canonical_json_bytes, format_float
from .dataset import Dataset
from .matching import MatchResult, match_cem
from .wake import Wake, WindowGrid, WindowSpec, compute_wakes_grid

ZERO_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class EffectEstimate:
    estimate: float
    std_error: float
    p_value: float
    n_matched_t: int
    n_matched_c: int
    degenerate: bool


@dataclass(frozen=True)
class ResultGrid:
    radii: tuple[float, ...]
    half_widths: tuple[int, ...]
    cells: dict[WindowSpec, EffectEstimate]

    def cell(self, radius_km: float, half_width_days: int) -> EffectEstimate:
        return self.cells[WindowSpec(radius_km, half_width_days)]

    def windows(self) -> list[WindowSpec]:
        """Radii-major cell order, the order of every serialization."""
        return [WindowSpec(r, t) for r in self.radii for t in self.half_widths]


# --- Student-t tail ------------------------------------------------------------

def _gammln(x: float) -> float:
    """log Gamma(x) for x > 0 (Lanczos approximation)."""
    cof = (76.18009172947146, -86.50532032941677, 24.01409824083091,
           -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5)
    y = x
    tmp = x + 5.5
    tmp -= (x + 0.5) * math.log(tmp)
    ser = 1.000000000190015
    for c in cof:
        y += 1.0
        ser += c / y
    return -tmp + math.log(2.5066282746310005 * ser / x)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    MAXIT, EPS, FPMIN = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    return h  # converged to machine precision long before MAXIT in practice


def _betai(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    bt = math.exp(_gammln(a + b) - _gammln(a) - _gammln(b)
                  + a * math.log(x) + b * math.log(1.0 - x))
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_p_value(t: float, df: float) -> float:
    """Two-sided Student-t tail probability P(|T| >= |t|)."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    p = _betai(df / 2.0, 0.5, x)
    return min(max(p, 0.0), 1.0)


# --- weighted least squares ------------------------------------------------------

def wls_did(rows: list[tuple[int, float, float]]) -> EffectEstimate:
    """Fit y on intercept + treated with weights; rows are (treated, y, w)."""
    if any(w <= 0 for _, _, w in rows):
        raise ValueError("weights must be positive")
    treated = [(y, w) for x, y, w in rows if x == 1]
    control = [(y, w) for x, y, w in rows if x == 0]
    n_t, n_c = len(treated), len(control)

    if n_t == 0 or n_c == 0:
        return EffectEstimate(estimate=0.0, std_error=0.0, p_value=1.0,
                              n_matched_t=n_t, n_matched_c=n_c, degenerate=True)

    w_t = sum(w for _, w in treated)
    w_c = sum(w for _, w in control)
    mean_t = sum(y * w for y, w in treated) / w_t
    mean_c = sum(y * w for y, w in control) / w_c
    b1 = mean_t - mean_c

    ssr = sum(w * (y - mean_t) ** 2 for y, w in treated)
    ssr += sum(w * (y - mean_c) ** 2 for y, w in control)
    df = len(rows) - 2

    if df <= 0 or ssr == 0.0:
        p = 0.0 if abs(b1) > ZERO_SLOPE_TOL else 1.0
        return EffectEstimate(estimate=b1, std_error=0.0, p_value=p,
                              n_matched_t=n_t, n_matched_c=n_c, degenerate=True)

    s2 = ssr / df
    se = math.sqrt(s2 * (w_t + w_c) / (w_t * w_c))
    p = t_p_value(b1 / se, df)
    return EffectEstimate(estimate=b1, std_error=se, p_value=p,
                          n_matched_t=n_t, n_matched_c=n_c, degenerate=False)


# --- grid sweep --------------------------------------------------------------------

def estimate_cell(wakes: list[Wake], ds: Dataset,
                  cutpoints: dict | None = None) -> tuple[EffectEstimate, MatchResult]:
    match = match_cem(wakes, list(ds.interventions), ds.schema, cutpoints)
    by_id = {w.intervention_id: w for w in wakes}
    rows = []
    for iv in ds.interventions:
        if not match.matched[iv.id]:
            continue
        wk = by_id[iv.id]
        x = 1 if iv.arm.value == "treatment" else 0
        rows.append((x, float(wk.n_post - wk.n_pre), match.weights[iv.id]))
    return wls_did(rows), match


def thread_cap() -> int:
    """Worker count from WAKESTORY_THREADS (0 or unset = auto)."""
    raw = os.environ.get("WAKESTORY_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def sweep_from_wakes(wakes_by_window: dict[WindowSpec, list[Wake]], ds: Dataset,
                     grid: WindowGrid, cutpoints: dict | None = None) -> ResultGrid:
    """Matched estimation per cell; merged by window key, so the result is
    identical whatever the worker schedule."""
    windows = grid.cells()
    workers = thread_cap()
    if workers > 1 and len(windows) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fits = list(pool.map(
                lambda w: estimate_cell(wakes_by_window[w], ds, cutpoints)[0], windows))
        cells = dict(zip(windows, fits))
    else:
        cells = {w: estimate_cell(wakes_by_window[w], ds, cutpoints)[0] for w in windows}
    return ResultGrid(radii=grid.radii, half_widths=grid.half_widths, cells=cells)


def sweep_grid(ds: Dataset, grid: WindowGrid,
               cutpoints: dict | None = None) -> ResultGrid:
    return sweep_from_wakes(compute_wakes_grid(ds, grid), ds, grid, cutpoints)


# --- serialization ---------------------------------------------------------------

RESULTS_CSV_HEADER = "radius_km,half_width_days,estimate,std_error,p_value,n_matched_t,n_matched_c,degenerate"


def _cell_doc(w: WindowSpec, e: EffectEstimate) -> dict:
    return {
        "radius_km": w.radius_km,
        "half_width_days": w.half_width_days,
        "estimate": e.estimate,
        "std_error": e.std_error,
        "p_value": e.p_value,
        "n_matched_t": e.n_matched_t,
        "n_matched_c": e.n_matched_c,
        "degenerate": e.degenerate,
    }


def results_to_csv(grid: ResultGrid) -> bytes:
    lines = [RESULTS_CSV_HEADER]
    for w in grid.windows():
        e = grid.cells[w]
        lines.append(",".join([
            format_float(w.radius_km),
            str(w.half_width_days),
            format_float(e.estimate),
            format_float(e.std_error),
            format_float(e.p_value),
            str(e.n_matched_t),
            str(e.n_matched_c),
            "true" if e.degenerate else "false",
        ]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def results_to_json(grid: ResultGrid) -> bytes:
    doc = {
        "radii": list(grid.radii),
        "half_widths": list(grid.half_widths),
        "cells": [_cell_doc(w, grid.cells[w]) for w in grid.windows()],
    }
    return canonical_json_bytes(doc)
