import math
import random

import pytest
import scipy.stats

from wakestory.dataset import CovariateSchema, Kind
from wakestory.estimation import (ResultGrid, estimate_cell, results_to_csv,
                                  results_to_json, sweep_grid, t_p_value, wls_did)
from wakestory.wake import WindowSpec, compute_wakes_grid, make_grid

from conftest import iv, random_dataset, dep
from wakestory.dataset import validate_dataset


def rows_for(treated_ys, control_ys, w=1.0):
    return ([(1, float(y), w) for y in treated_ys]
            + [(0, float(y), w) for y in control_ys])


# --- t distribution -----------------------------------------------------------

def test_t_zero_gives_one():
    assert t_p_value(0.0, 5) == 1.0


def test_t_is_even_in_t():
    for t in (0.3, 1.0, 2.5, 7.0):
        for df in (1, 3, 10, 100):
            assert t_p_value(t, df) == t_p_value(-t, df)


def test_t_normal_limit():
    assert abs(t_p_value(1.962, 1000) - 0.050) < 1e-3


def test_t_matches_scipy_to_1e8():
    rng = random.Random(77)
    for _ in range(300):
        t = rng.uniform(-8.0, 8.0)
        df = rng.choice([1, 2, 3, 5, 10, 30, 120, 500, 2000])
        expected = 2.0 * scipy.stats.t.sf(abs(t), df)
        got = t_p_value(t, df)
        assert got == pytest.approx(expected, rel=1e-8, abs=1e-300)


def test_t_requires_df_at_least_one():
    with pytest.raises(ValueError):
        t_p_value(1.0, 0.5)


# --- weighted least squares -------------------------------------------------------

def test_exact_fit_is_degenerate_with_p_zero():
    e = wls_did(rows_for([5, 5], [3, 3]))
    assert e.estimate == pytest.approx(2.0)
    assert e.degenerate and e.std_error == 0.0 and e.p_value == 0.0


def test_worked_example():
    # treated {4,6}, control {3,3}: b1=2, se=1, t=2, df=2, p = 1 - 2/sqrt(6)
    e = wls_did(rows_for([4, 6], [3, 3]))
    assert e.estimate == pytest.approx(2.0, abs=1e-12)
    assert e.std_error == pytest.approx(1.0, abs=1e-12)
    assert e.p_value == pytest.approx(1 - 2 / math.sqrt(6), abs=1e-12)
    assert e.p_value == pytest.approx(0.1835, abs=1e-3)
    assert not e.degenerate


def test_flat_outcome_gives_zero_estimate_p_one():
    e = wls_did(rows_for([4, 4, 4], [4, 4, 4]))
    assert e.estimate == 0.0
    assert e.degenerate and e.p_value == 1.0  # zero residuals, zero slope

    e2 = wls_did(rows_for([4, 5, 4, 5], [4, 5, 4, 5]))
    assert e2.estimate == 0.0
    assert not e2.degenerate and e2.p_value == 1.0


def test_unit_weights_equal_difference_of_means():
    rng = random.Random(5)
    for _ in range(50):
        t_ys = [rng.uniform(-10, 10) for _ in range(rng.randint(2, 20))]
        c_ys = [rng.uniform(-10, 10) for _ in range(rng.randint(2, 20))]
        e = wls_did(rows_for(t_ys, c_ys))
        diff = sum(t_ys) / len(t_ys) - sum(c_ys) / len(c_ys)
        assert abs(e.estimate - diff) < 1e-10


def test_label_swap_negates_estimate_and_keeps_p():
    rng = random.Random(6)
    for _ in range(30):
        rows = [(rng.randint(0, 1), rng.uniform(-5, 5), rng.uniform(0.2, 3.0))
                for _ in range(rng.randint(6, 25))]
        if len({x for x, _, _ in rows}) < 2:
            continue
        e = wls_did(rows)
        swapped = wls_did([(1 - x, y, w) for x, y, w in rows])
        assert swapped.estimate == pytest.approx(-e.estimate, abs=1e-12)
        assert swapped.p_value == pytest.approx(e.p_value, rel=1e-12)
        assert swapped.std_error == pytest.approx(e.std_error, rel=1e-12)


def test_weight_scaling_invariance():
    rng = random.Random(7)
    rows = [(i % 2, rng.uniform(-4, 9), rng.uniform(0.5, 2.0)) for i in range(16)]
    base = wls_did(rows)
    for c in (0.001, 0.5, 7.0, 1234.5):
        scaled = wls_did([(x, y, w * c) for x, y, w in rows])
        assert scaled.estimate == pytest.approx(base.estimate, rel=1e-12)
        assert scaled.std_error == pytest.approx(base.std_error, rel=1e-12)
        assert scaled.p_value == pytest.approx(base.p_value, rel=1e-12)


def test_matches_statsmodels_wls():
    sm = pytest.importorskip("statsmodels.api")
    import numpy as np

    rng = random.Random(41)
    for _ in range(20):
        n = rng.randint(6, 40)
        rows = [(rng.randint(0, 1), rng.gauss(0, 2), rng.uniform(0.1, 5.0))
                for _ in range(n)]
        if len({x for x, _, _ in rows}) < 2:
            continue
        e = wls_did(rows)
        if e.degenerate:
            continue
        X = sm.add_constant(np.array([float(x) for x, _, _ in rows]))
        fit = sm.WLS(np.array([y for _, y, _ in rows]), X,
                     weights=np.array([w for _, _, w in rows])).fit()
        assert e.estimate == pytest.approx(fit.params[1], rel=1e-12)
        assert e.std_error == pytest.approx(fit.bse[1], rel=1e-12)
        assert e.p_value == pytest.approx(fit.pvalues[1], rel=1e-9)


def test_empty_arm_is_degenerate_not_a_crash():
    e = wls_did([(1, 3.0, 1.0), (1, 5.0, 1.0)])
    assert e.degenerate and e.n_matched_c == 0 and e.p_value == 1.0
    assert wls_did([]).degenerate


def test_nonpositive_weights_rejected():
    with pytest.raises(ValueError):
        wls_did([(1, 2.0, 0.0), (0, 1.0, 1.0)])
    with pytest.raises(ValueError):
        wls_did([(1, 2.0, -1.0), (0, 1.0, 1.0)])


def test_two_rows_degenerate():
    e = wls_did(rows_for([4], [7]))
    assert e.degenerate  # df = 0: a two-point fit has no residual information
    assert e.estimate == pytest.approx(-3.0)
    assert e.p_value == 0.0


# --- grid sweep ----------------------------------------------------------------

def test_all_cells_degenerate_when_no_stratum_crosses_arms():
    interventions = [iv("T1", 100, 65.0, 33.0, "treatment", (0.0,)),
                     iv("T2", 101, 65.0, 33.0, "treatment", (0.0,)),
                     iv("C1", 102, 65.0, 33.0, "control", (1.0,)),
                     iv("C2", 103, 65.0, 33.0, "control", (1.0,))]
    deps = [dep("D1", 90, 65.0, 33.0), dep("D2", 110, 65.0, 33.0)]
    schema = CovariateSchema(names=("b",), kinds=(Kind.BINARY,))
    grid = make_grid([5.0, 10.0], [10, 20])
    ds = validate_dataset(interventions, deps, schema, grid)
    res = sweep_grid(ds, grid)
    assert all(e.degenerate for e in res.cells.values())
    assert all(e.n_matched_t == 0 for e in res.cells.values())


def test_single_cell_grid_equals_direct_pipeline():
    ds = random_dataset(21, n_t=12, n_c=12, n_dep=250)
    grid = make_grid([10.0], [20])
    res = sweep_grid(ds, grid)
    wakes = compute_wakes_grid(ds, grid)[WindowSpec(10.0, 20)]
    direct, _ = estimate_cell(wakes, ds)
    assert res.cell(10.0, 20) == direct


def test_results_csv_shape_and_values():
    ds = random_dataset(22, n_t=10, n_c=10, n_dep=200)
    grid = make_grid([5.0, 10.0, 20.0], [10, 20])
    res = sweep_grid(ds, grid)
    text = results_to_csv(res).decode()
    lines = text.strip().split("\n")
    assert lines[0] == ("radius_km,half_width_days,estimate,std_error,p_value,"
                        "n_matched_t,n_matched_c,degenerate")
    assert len(lines) == 1 + 6
    # radii-major order
    firsts = [ln.split(",")[0] for ln in lines[1:]]
    assert firsts == ["5", "5", "10", "10", "20", "20"]
    assert all(ln.split(",")[7] in ("true", "false") for ln in lines[1:])


def test_results_serializations_are_deterministic():
    ds = random_dataset(23, n_t=8, n_c=8, n_dep=150)
    grid = make_grid([5.0, 10.0], [10, 20])
    a, b = sweep_grid(ds, grid), sweep_grid(ds, grid)
    assert results_to_csv(a) == results_to_csv(b)
    assert results_to_json(a) == results_to_json(b)
    doc = results_to_json(a).decode()
    assert doc.startswith('{"cells":[')
