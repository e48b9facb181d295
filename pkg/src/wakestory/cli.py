"""Command-line entry point.

Exit codes are a stable contract: 0 ok, 1 I/O failure, 2 validation error,
3 no admissible actor pair. WAKESTORY_THREADS caps grid parallelism (0 =
auto); outputs are byte-identical whatever the cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataset as ds_mod
from . import errors, synth
from .actors import reference_window, select_actors
from .canonical import canonical_json
from .estimation import estimate_cell, results_to_csv, results_to_json, sweep_from_wakes
from .storygen import build_bundle, serialize_bundle
from .wake import compute_wakes_grid, make_grid

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NO_ACTORS = 3


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _parse_radii(raw: str) -> list[float]:
    try:
        return [float(x) for x in raw.split(",") if x != ""]
    except ValueError as exc:
        raise errors.BadGrid(f"bad radius list {raw!r}") from exc


def _parse_halfwidths(raw: str) -> list[int]:
    out = []
    for x in raw.split(","):
        if x == "":
            continue
        try:
            out.append(int(x))
        except ValueError as exc:
            raise errors.BadGrid(f"bad half-width list {raw!r}") from exc
    return out


def _load_dataset(args) -> ds_mod.Dataset:
    grid = make_grid(_parse_radii(args.radii), _parse_halfwidths(args.halfwidths))
    interventions, schema = ds_mod.parse_interventions(_read(args.interventions))
    dependents = ds_mod.parse_dependent(_read(args.dependent))
    cfg = getattr(args, "_scenario", None)
    if cfg is not None and cfg.covariate_kinds:
        schema = ds_mod.apply_kind_overrides(schema, interventions, cfg.covariate_kinds)
    ds = ds_mod.validate_dataset(interventions, dependents, schema, grid)
    args._grid = grid
    return ds


def _print_warnings(ds: ds_mod.Dataset) -> None:
    for w in ds.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_validate(args) -> int:
    try:
        ds = _load_dataset(args)
    except errors.ValidationError as exc:
        if args.json:
            print(canonical_json({"ok": False, "error": type(exc).__name__,
                                  "detail": str(exc)}), end="")
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.json:
        print(canonical_json({
            "ok": True,
            "interventions": len(ds.interventions),
            "dependents": len(ds.dependents),
            "covariates": list(ds.schema.names),
            "extent": [ds.extent[0].isoformat(), ds.extent[1].isoformat()],
            "truncated": sorted(ds.truncated),
            "warnings": list(ds.warnings),
        }), end="")
    else:
        _print_warnings(ds)
        print(f"ok: {len(ds.interventions)} interventions, "
              f"{len(ds.dependents)} dependent events, "
              f"extent {ds.extent[0].isoformat()}..{ds.extent[1].isoformat()}",
              file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    ds = _load_dataset(args)
    _print_warnings(ds)
    grid = args._grid
    wakes = compute_wakes_grid(ds, grid)
    cfg = getattr(args, "_scenario", None)
    results = sweep_from_wakes(wakes, ds, grid, cfg.cutpoints if cfg else None)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_bytes(results_to_csv(results))
    (out / "results.json").write_bytes(results_to_json(results))
    return EXIT_OK


def _story_parts(args):
    ds = _load_dataset(args)
    _print_warnings(ds)
    grid = args._grid
    cfg = getattr(args, "_scenario", None)
    cutpoints = cfg.cutpoints if cfg else None
    weights = cfg.actor_weights if cfg else ds_mod.DEFAULT_ACTOR_WEIGHTS
    wakes = compute_wakes_grid(ds, grid)
    ref = reference_window(grid)
    _, match_ref = estimate_cell(wakes[ref], ds, cutpoints)
    pair = select_actors(ds, grid, wakes[ref], match_ref, weights)
    return ds, grid, cfg, wakes, match_ref, pair


def cmd_actors(args) -> int:
    _, _, _, _, _, pair = _story_parts(args)
    print(canonical_json({
        "treatment_id": pair.treatment_id,
        "control_id": pair.control_id,
        "reference_window": {"radius_km": pair.reference_window.radius_km,
                             "half_width_days": pair.reference_window.half_width_days},
        "score": pair.score,
        "report": list(pair.report),
    }), end="")
    return EXIT_OK


def cmd_story(args) -> int:
    ds, grid, cfg, wakes, match_ref, pair = _story_parts(args)
    results = sweep_from_wakes(wakes, ds, grid, cfg.cutpoints)
    bundle = build_bundle(ds, grid, results, pair, cfg, wakes, match_ref)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_bytes(results_to_csv(results))
    (out / "results.json").write_bytes(results_to_json(results))
    (out / "bundle.json").write_bytes(serialize_bundle(bundle))
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = synth.SynthSpec(
        seed=args.seed,
        days=args.days,
        box_deg=args.box_deg,
        background_mean=args.dependents,
        n_treatment=args.treatments,
        n_control=args.controls,
        inject_mean=args.inject_mean,
        binary_covariates=tuple(c for c in args.binary.split(",") if c),
        continuous_covariates=tuple(c for c in args.continuous.split(",") if c),
    )
    interventions, dependents, schema = synth.generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "interventions.csv").write_bytes(
        ds_mod.interventions_to_csv(interventions, schema))
    (out / "dependent.csv").write_bytes(ds_mod.dependents_to_csv(dependents))
    print(f"wrote {len(interventions)} interventions, {len(dependents)} dependent "
          f"events to {out}", file=sys.stderr)
    return EXIT_OK


def _add_data_args(p: argparse.ArgumentParser, scenario_required: bool | None) -> None:
    p.add_argument("--interventions", required=True, help="interventions.csv path")
    p.add_argument("--dependent", required=True, help="dependent.csv path")
    p.add_argument("--radii", required=True, help="comma-separated radii in km")
    p.add_argument("--halfwidths", required=True,
                   help="comma-separated even half-widths in days")
    if scenario_required is not None:
        p.add_argument("--scenario", required=scenario_required,
                       help="scenario.json path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wakestory",
        description="Windowed event analysis with matching, and story-bundle generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the input files and report warnings")
    _add_data_args(p, scenario_required=None)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="sweep the window grid, write results files")
    _add_data_args(p, scenario_required=False)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("actors", help="print the selected exemplar pair as JSON")
    _add_data_args(p, scenario_required=False)
    p.set_defaults(func=cmd_actors)

    p = sub.add_parser("story", help="generate bundle.json plus results files")
    _add_data_args(p, scenario_required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_story)

    p = sub.add_parser("synth", help="write a synthetic dataset (testing/demo tooling)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=365)
    p.add_argument("--box-deg", type=float, default=10.0,
                   help="side of the square study box in degrees")
    p.add_argument("--dependents", type=float, default=2000.0,
                   help="mean background dependent-event count")
    p.add_argument("--treatments", type=int, default=100)
    p.add_argument("--controls", type=int, default=100)
    p.add_argument("--inject-mean", type=float, default=3.0)
    p.add_argument("--binary", default="", help="comma-separated binary covariate names")
    p.add_argument("--continuous", default="",
                   help="comma-separated continuous covariate names")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "scenario", None):
        try:
            args._scenario = ds_mod.parse_scenario(_read(args.scenario))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except errors.ValidationError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION

    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except errors.NoActors as exc:
        print(canonical_json({"error": "NoActors", "report": exc.report}), end="")
        print("error: no admissible actor pair; see report above", file=sys.stderr)
        return EXIT_NO_ACTORS
    except errors.ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
