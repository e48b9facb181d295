#!/usr/bin/env python3
"""Regenerate the viewer test fixtures from the demo dataset.

Writes tests/fixtures/bundle.json (the engine's story output) and
tests/fixtures/trend_table.json (engine-computed window counts for both
actors at every even half-width in the drag range, used to check that the
client-side recomputation is exact).

Run from the repository root after changing the engine or the demo data:

    python3 frontend/scripts/export_fixtures.py
"""

from pathlib import Path

from wakestory.actors import reference_window
from wakestory.canonical import canonical_json_bytes
from wakestory.dataset import parse_dependent, parse_interventions, parse_scenario, validate_dataset
from wakestory.geo import haversine_km
from wakestory.storygen import generate_story, serialize_bundle
from wakestory.wake import day_offset, make_grid, window_counts

REPO = Path(__file__).resolve().parents[2]
DEMO = REPO / "demo"
FIXTURES = REPO / "frontend" / "tests" / "fixtures"

RADII = [5.0, 10.0, 20.0]
HALF_WIDTHS = [10, 20, 30]


def main() -> None:
    grid = make_grid(RADII, HALF_WIDTHS)
    interventions, schema = parse_interventions((DEMO / "interventions.csv").read_bytes())
    dependents = parse_dependent((DEMO / "dependent.csv").read_bytes())
    cfg = parse_scenario((DEMO / "scenario.json").read_bytes())
    ds = validate_dataset(interventions, dependents, schema, grid)

    bundle, _results = generate_story(ds, grid, cfg)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "bundle.json").write_bytes(serialize_bundle(bundle))

    ref = reference_window(grid)
    table: dict = {"reference_radius_km": ref.radius_km, "arms": {}}
    for arm in ("treatment", "control"):
        actor_id = bundle["data"]["actor_slices"][arm]["id"]
        iv = next(i for i in ds.interventions if i.id == actor_id)
        offsets = sorted(
            day_offset(e.date, iv.date) for e in ds.dependents
            if haversine_km(iv.loc, e.loc) <= ref.radius_km
            and day_offset(e.date, iv.date) != 0
            and abs(day_offset(e.date, iv.date)) <= grid.t_max
        )
        per_t = {}
        for half in range(2, grid.t_max + 1, 2):
            n_pre, n_post, n_early, n_recent, trend = window_counts(offsets, half)
            per_t[str(half)] = {"n_pre": n_pre, "n_post": n_post,
                                "n_early": n_early, "n_recent": n_recent,
                                "trend": trend}
        table["arms"][arm] = {"id": actor_id, "counts": per_t}
    (FIXTURES / "trend_table.json").write_bytes(canonical_json_bytes(table))
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
