import random

from wakestory.dataset import GeoPoint, validate_dataset
from wakestory.geo import build_index, haversine_km
from wakestory.wake import (WindowSpec, compute_wake, compute_wakes_grid,
                            day_offset, make_grid, window_counts)

from conftest import day, dep, iv, random_dataset, schema_of, small_grid


def test_day_offset():
    assert day_offset(day(10), day(10)) == 0
    assert day_offset(day(15), day(10)) == 5
    assert day_offset(day(0), day(30)) == -30


def offsets_to_events(offsets, lon=65.0, lat=33.0, anchor=100):
    return [dep(f"D{i}", anchor + o, lon, lat) for i, o in enumerate(offsets)]


def wake_at(offsets, t, radius=10.0):
    events = offsets_to_events(offsets)
    index = build_index(events, r_max=radius)
    return compute_wake(iv("T1", 100, 65.0, 33.0, "treatment"), index,
                        WindowSpec(radius, t))


def test_empty_neighborhood():
    events = offsets_to_events([-3, 4], lon=70.0)  # ~460 km away
    index = build_index(events, r_max=10.0)
    w = compute_wake(iv("T1", 100, 65.0, 33.0, "treatment"), index,
                     WindowSpec(10.0, 10))
    assert (w.n_pre, w.n_post, w.trend, w.offsets) == (0, 0, 0, ())


def test_worked_counting_example():
    w = wake_at([-8, -2, -1, 3, 4], t=10)
    assert w.n_pre == 3
    assert w.n_post == 2
    assert w.trend == 1  # early half holds -8; recent half holds -2, -1
    assert w.offsets == (-8, -2, -1, 3, 4)


def test_window_size_changes_the_counts():
    # an event 7 days before the intervention is inside a 30-day window
    # but outside a 4-day one
    wide = wake_at([-7], t=30)
    narrow = wake_at([-7], t=4)
    assert wide.n_pre == 1
    assert narrow.n_pre == 0


def test_day_zero_never_counted():
    w = wake_at([0, 0, 1, -1], t=10)
    assert (w.n_pre, w.n_post) == (1, 1)
    assert w.offsets == (-1, 1)


def test_trend_halves():
    # t=10: early half [-10,-6], recent half [-5,-1]
    assert window_counts([-10, -6, -5, -1], 10) == (4, 0, 2, 2, 0)
    assert window_counts([-5, -4, -3], 10) == (3, 0, 0, 3, 3)
    assert window_counts([-10, -9], 10) == (2, 0, 2, 0, -2)


def test_mirrored_pre_window_has_zero_trend():
    rng = random.Random(1)
    for _ in range(50):
        t = rng.choice([4, 10, 20, 30])
        pre = [rng.randint(-t, -1) for _ in range(rng.randint(0, 12))]
        mirrored = pre + [-t - 1 - o for o in pre]
        _, _, _, _, trend = window_counts(mirrored, t)
        assert trend == 0


def test_trend_bounded_by_pre_count():
    rng = random.Random(2)
    for _ in range(200):
        t = rng.choice([2, 6, 10, 28])
        offs = [rng.randint(-t, t) for _ in range(rng.randint(0, 15))]
        n_pre, _, _, _, trend = window_counts(offs, t)
        assert abs(trend) <= n_pre


def test_grid_cardinality():
    ds = random_dataset(0, n_t=5, n_c=5, n_dep=50)
    grid = make_grid([5.0, 10.0], [10, 20, 30])
    wakes = compute_wakes_grid(ds, grid)
    assert len(wakes) == 6
    assert all(len(v) == 10 for v in wakes.values())
    for w, lst in wakes.items():
        assert [x.intervention_id for x in lst] == [i.id for i in ds.interventions]
        assert all(x.window == w for x in lst)


def test_counts_monotone_in_radius_and_halfwidth():
    ds = random_dataset(3, n_t=10, n_c=10, n_dep=300)
    grid = small_grid()
    wakes = compute_wakes_grid(ds, grid)
    for i in range(len(ds.interventions)):
        for a in grid.radii:
            for b in grid.radii:
                if a > b:
                    continue
                for t1 in grid.half_widths:
                    for t2 in grid.half_widths:
                        if t1 > t2:
                            continue
                        lo = wakes[WindowSpec(a, t1)][i]
                        hi = wakes[WindowSpec(b, t2)][i]
                        assert lo.n_pre <= hi.n_pre
                        assert lo.n_post <= hi.n_post


def test_grid_equals_single_wake_computation():
    # the batched grid path and the one-off path must agree cell by cell
    ds = random_dataset(4, n_t=8, n_c=8, n_dep=150)
    grid = small_grid()
    wakes = compute_wakes_grid(ds, grid)
    index = build_index(list(ds.dependents), grid.r_max)
    for w in grid.cells():
        for k, intervention in enumerate(ds.interventions):
            assert compute_wake(intervention, index, w) == wakes[w][k]


def test_spot_cells_match_brute_force():
    ds = random_dataset(5, n_t=10, n_c=10, n_dep=250)
    grid = small_grid()
    wakes = compute_wakes_grid(ds, grid)
    rng = random.Random(9)
    for _ in range(15):
        w = rng.choice(grid.cells())
        k = rng.randrange(len(ds.interventions))
        intervention = ds.interventions[k]
        offsets = sorted(
            day_offset(e.date, intervention.date)
            for e in ds.dependents
            if haversine_km(intervention.loc, e.loc) <= w.radius_km
            and day_offset(e.date, intervention.date) != 0
            and abs(day_offset(e.date, intervention.date)) <= w.half_width_days
        )
        got = wakes[w][k]
        assert got.offsets == tuple(offsets)
        n_pre, n_post, _, _, trend = window_counts(offsets, w.half_width_days)
        assert (got.n_pre, got.n_post, got.trend) == (n_pre, n_post, trend)
