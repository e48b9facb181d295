"""Event-class inputs: parsing, validation, and the scenario configuration.

Two CSV files feed the analysis: interventions (treatment/control arms plus
covariate columns) and dependent events. Both are plain UTF-8 CSV without
quoting; embedded commas are rejected by construction. A scenario.json file
carries the narrative configuration for story generation.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from datetime import date
from typing import TYPE_CHECKING, Iterable

from . import errors
from .canonical import format_float

if TYPE_CHECKING:
    from .wake import WindowGrid

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

INTERVENTION_COLUMNS = ("id", "date", "lon", "lat", "arm")
DEPENDENT_COLUMNS = ("id", "date", "lon", "lat")

THEME_ROLES = ("treatment", "control", "dependent", "positive", "negative")

DEFAULT_THEME = {
    "treatment": "#c2452d",
    "control": "#2c6fbb",
    "dependent": "#6b6b6b",
    "positive": "#b2182b",
    "negative": "#2166ac",
    "neutral": "#f5f0eb",
}

DEFAULT_ACTOR_WEIGHTS = (2.0, 2.0, 1.0)


class Arm(enum.Enum):
    TREATMENT = "treatment"
    CONTROL = "control"


class Kind(enum.Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class GeoPoint:
    lon: float
    lat: float


@dataclass(frozen=True)
class DependentEvent:
    id: str
    date: date
    loc: GeoPoint


@dataclass(frozen=True)
class InterventionEvent:
    id: str
    date: date
    loc: GeoPoint
    arm: Arm
    covariates: tuple[float, ...]


@dataclass(frozen=True)
class CovariateSchema:
    names: tuple[str, ...]
    kinds: tuple[Kind, ...]

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class Dataset:
    interventions: tuple[InterventionEvent, ...]
    dependents: tuple[DependentEvent, ...]
    schema: CovariateSchema
    extent: tuple[date, date]
    truncated: frozenset[str]  # intervention ids whose widest window leaves the extent
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    treatment_label: str
    control_label: str
    dependent_label: str
    hook_question: str
    region_name: str = ""
    background: str = ""
    data_source: str = ""
    references: tuple[str, ...] = ()
    effect_units_phrase: str = "per intervention"
    color_theme: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_THEME))
    tile_url_template: str | None = None
    seed: int = 0
    covariate_kinds: dict[str, str] = field(default_factory=dict)
    cutpoints: dict[str, tuple[float, ...]] = field(default_factory=dict)
    actor_weights: tuple[float, float, float] = DEFAULT_ACTOR_WEIGHTS


# --- CSV parsing -------------------------------------------------------------

def _lines(csv_bytes: bytes) -> list[str]:
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise errors.BadEncoding(f"input is not valid UTF-8: {exc}") from exc
    if text.startswith("﻿"):
        text = text[1:]
    return [ln.rstrip("\r") for ln in text.split("\n")]


def _parse_date(token: str, row: int) -> date:
    if not _DATE_RE.match(token):
        raise errors.BadDate(row, token)
    try:
        return date.fromisoformat(token)
    except ValueError as exc:
        raise errors.BadDate(row, token) from exc


def _parse_coord(token: str, row: int, name: str, lo: float, hi: float) -> float:
    try:
        v = float(token)
    except ValueError as exc:
        raise errors.BadCoordinate(row, name, token) from exc
    if not math.isfinite(v) or v < lo or v > hi:
        raise errors.BadCoordinate(row, name, token)
    return v


def _parse_point(lon_tok: str, lat_tok: str, row: int) -> GeoPoint:
    lon = _parse_coord(lon_tok, row, "lon", -180.0, 180.0)
    lat = _parse_coord(lat_tok, row, "lat", -90.0, 90.0)
    return GeoPoint(lon=lon, lat=lat)


def parse_interventions(csv_bytes: bytes) -> tuple[list[InterventionEvent], CovariateSchema]:
    """Parse the interventions table; covariate kinds are inferred from data.

    A column whose observed values all lie in {0, 1} is Binary, anything else
    Continuous. The inference is a set property, so row order cannot change it.
    """
    lines = _lines(csv_bytes)
    if not lines or not lines[0]:
        raise errors.MalformedHeader("empty input")
    header = lines[0].split(",")
    if tuple(header[:5]) != INTERVENTION_COLUMNS:
        raise errors.MalformedHeader(
            f"expected header to start with {','.join(INTERVENTION_COLUMNS)}, got {lines[0]!r}"
        )
    cov_names = header[5:]
    if any(not c for c in cov_names):
        raise errors.MalformedHeader("empty covariate column name")
    if len(set(cov_names)) != len(cov_names):
        raise errors.MalformedHeader("duplicate covariate column name")

    n_cols = len(header)
    events: list[InterventionEvent] = []
    seen: set[str] = set()
    binary_ok = [True] * len(cov_names)

    row = 0
    for line in lines[1:]:
        if line == "":
            continue
        row += 1
        fields = line.split(",")
        if len(fields) != n_cols:
            raise errors.RowWidth(row, n_cols, len(fields))
        id_ = fields[0]
        if not id_:
            raise errors.EmptyId(row)
        if id_ in seen:
            raise errors.DuplicateId(id_)
        seen.add(id_)
        when = _parse_date(fields[1], row)
        loc = _parse_point(fields[2], fields[3], row)
        arm_tok = fields[4].lower()
        if arm_tok == "treatment":
            arm = Arm.TREATMENT
        elif arm_tok == "control":
            arm = Arm.CONTROL
        else:
            raise errors.BadArm(row, fields[4])
        values = []
        for j, tok in enumerate(fields[5:]):
            try:
                v = float(tok)
            except ValueError as exc:
                raise errors.NonNumericCovariate(row, cov_names[j], tok) from exc
            if not math.isfinite(v):
                raise errors.NonNumericCovariate(row, cov_names[j], tok)
            if v not in (0.0, 1.0):
                binary_ok[j] = False
            values.append(v)
        events.append(InterventionEvent(id=id_, date=when, loc=loc, arm=arm,
                                        covariates=tuple(values)))

    kinds = tuple(Kind.BINARY if ok else Kind.CONTINUOUS for ok in binary_ok)
    return events, CovariateSchema(names=tuple(cov_names), kinds=kinds)


def parse_dependent(csv_bytes: bytes) -> list[DependentEvent]:
    lines = _lines(csv_bytes)
    if not lines or not lines[0]:
        raise errors.MalformedHeader("empty input")
    if tuple(lines[0].split(",")) != DEPENDENT_COLUMNS:
        raise errors.MalformedHeader(
            f"expected header {','.join(DEPENDENT_COLUMNS)}, got {lines[0]!r}"
        )
    events: list[DependentEvent] = []
    seen: set[str] = set()
    row = 0
    for line in lines[1:]:
        if line == "":
            continue
        row += 1
        fields = line.split(",")
        if len(fields) != 4:
            raise errors.RowWidth(row, 4, len(fields))
        id_ = fields[0]
        if not id_:
            raise errors.EmptyId(row)
        if id_ in seen:
            raise errors.DuplicateId(id_)
        seen.add(id_)
        when = _parse_date(fields[1], row)
        loc = _parse_point(fields[2], fields[3], row)
        events.append(DependentEvent(id=id_, date=when, loc=loc))
    return events


def apply_kind_overrides(
    schema: CovariateSchema,
    interventions: Iterable[InterventionEvent],
    overrides: dict[str, str],
) -> CovariateSchema:
    """Override inferred covariate kinds; a Binary override re-checks values."""
    if not overrides:
        return schema
    by_name = {n: i for i, n in enumerate(schema.names)}
    kinds = list(schema.kinds)
    for name, kind_tok in overrides.items():
        if name not in by_name:
            raise errors.ConfigError(f"covariate_kinds names unknown column {name!r}")
        try:
            kind = Kind(kind_tok)
        except ValueError as exc:
            raise errors.ConfigError(f"bad covariate kind {kind_tok!r} for {name!r}") from exc
        j = by_name[name]
        if kind is Kind.BINARY:
            for iv in interventions:
                if iv.covariates[j] not in (0.0, 1.0):
                    raise errors.ConfigError(
                        f"column {name!r} cannot be binary: value {iv.covariates[j]} in {iv.id}"
                    )
        kinds[j] = kind
    return CovariateSchema(names=schema.names, kinds=tuple(kinds))


# --- validation ---------------------------------------------------------------

def validate_dataset(
    interventions: list[InterventionEvent],
    dependents: list[DependentEvent],
    schema: CovariateSchema,
    grid: "WindowGrid",
) -> Dataset:
    """Check cross-record invariants and assemble the immutable Dataset.

    Interventions whose widest window [date - T_max, date + T_max] is not fully
    inside the data extent are kept but flagged truncated, with one warning each.
    """
    for t in grid.half_widths:
        if t < 2 or t % 2 != 0:
            raise errors.OddHalfWidth(t)
    if not any(iv.arm is Arm.TREATMENT for iv in interventions):
        raise errors.NoTreatment("dataset has no treatment intervention")
    if not any(iv.arm is Arm.CONTROL for iv in interventions):
        raise errors.NoControl("dataset has no control intervention")
    if not dependents:
        raise errors.NoDependent("dataset has no dependent events")
    for iv in interventions:
        if len(iv.covariates) != len(schema):
            raise errors.SchemaMismatch(
                f"{iv.id}: {len(iv.covariates)} covariates, schema has {len(schema)}")
        for name, kind, v in zip(schema.names, schema.kinds, iv.covariates):
            if not math.isfinite(v):
                raise errors.SchemaMismatch(f"{iv.id}: covariate {name!r} is not finite")
            if kind is Kind.BINARY and v not in (0.0, 1.0):
                raise errors.SchemaMismatch(
                    f"{iv.id}: binary covariate {name!r} has value {v}")

    all_dates = [e.date for e in interventions] + [e.date for e in dependents]
    extent = (min(all_dates), max(all_dates))

    t_max = grid.half_widths[-1]
    truncated = []
    warnings = []
    for iv in interventions:
        lo = iv.date.toordinal() - t_max
        hi = iv.date.toordinal() + t_max
        if lo < extent[0].toordinal() or hi > extent[1].toordinal():
            truncated.append(iv.id)
            warnings.append(
                f"intervention {iv.id}: window of +/-{t_max} days leaves the data extent; kept, flagged truncated"
            )

    return Dataset(
        interventions=tuple(interventions),
        dependents=tuple(dependents),
        schema=schema,
        extent=extent,
        truncated=frozenset(truncated),
        warnings=tuple(warnings),
    )


# --- re-serialization ----------------------------------------------------------

def _csv_value(v: float) -> str:
    return format_float(v)


def interventions_to_csv(events: Iterable[InterventionEvent], schema: CovariateSchema) -> bytes:
    out = [",".join(INTERVENTION_COLUMNS + schema.names)]
    for e in events:
        row = [e.id, e.date.isoformat(), _csv_value(e.loc.lon), _csv_value(e.loc.lat),
               e.arm.value]
        row.extend(_csv_value(v) for v in e.covariates)
        out.append(",".join(row))
    return ("\n".join(out) + "\n").encode("utf-8")


def dependents_to_csv(events: Iterable[DependentEvent]) -> bytes:
    out = [",".join(DEPENDENT_COLUMNS)]
    for e in events:
        out.append(",".join([e.id, e.date.isoformat(),
                             _csv_value(e.loc.lon), _csv_value(e.loc.lat)]))
    return ("\n".join(out) + "\n").encode("utf-8")


# --- scenario configuration -----------------------------------------------------

_REQUIRED_KEYS = ("treatment_label", "control_label", "dependent_label", "hook_question")
_OPTIONAL_KEYS = (
    "region_name", "background", "data_source", "references", "effect_units_phrase",
    "color_theme", "tile_url_template", "seed", "covariate_kinds", "cutpoints",
    "actor_weights",
)


def render_template(template: str, cfg: ScenarioConfig) -> str:
    """Substitute {field} placeholders from the scenario's string fields.

    Unknown names and empty values both raise: a hook with a hole in it is
    worse than no hook.
    """
    mapping = {
        "treatment_label": cfg.treatment_label,
        "control_label": cfg.control_label,
        "dependent_label": cfg.dependent_label,
        "region_name": cfg.region_name,
        "data_source": cfg.data_source,
        "effect_units_phrase": cfg.effect_units_phrase,
    }

    def sub(m: re.Match) -> str:
        name = m.group(1)
        value = mapping.get(name, "")
        if not value:
            raise errors.UnresolvedPlaceholder(name)
        return value

    return _PLACEHOLDER_RE.sub(sub, template)


def parse_scenario(json_bytes: bytes) -> ScenarioConfig:
    try:
        doc = json.loads(json_bytes.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise errors.ConfigError(f"scenario.json is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise errors.ConfigError("scenario.json must contain an object")

    allowed = set(_REQUIRED_KEYS) | set(_OPTIONAL_KEYS)
    for key in doc:
        if key not in allowed:
            raise errors.UnknownConfigKey(key)
    for key in _REQUIRED_KEYS:
        if key not in doc:
            raise errors.ConfigError(f"scenario.json is missing required key {key!r}")

    def a_str(key: str, default: str = "") -> str:
        v = doc.get(key, default)
        if not isinstance(v, str):
            raise errors.ConfigError(f"{key} must be a string")
        return v

    for key in ("treatment_label", "control_label", "dependent_label"):
        if not a_str(key):
            raise errors.ConfigError(f"{key} must be nonempty")

    references = doc.get("references", [])
    if not isinstance(references, list) or any(not isinstance(r, str) for r in references):
        raise errors.ConfigError("references must be a list of strings")

    theme = dict(DEFAULT_THEME)
    if "color_theme" in doc:
        user_theme = doc["color_theme"]
        if not isinstance(user_theme, dict) or any(
            not isinstance(v, str) for v in user_theme.values()
        ):
            raise errors.ConfigError("color_theme must map role names to color strings")
        theme = dict(user_theme)
        for role in THEME_ROLES:
            if role not in theme:
                raise errors.MissingThemeRole(role)

    tile = doc.get("tile_url_template")
    if tile is not None and not isinstance(tile, str):
        raise errors.ConfigError("tile_url_template must be a string")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise errors.ConfigError("seed must be an integer")

    kinds = doc.get("covariate_kinds", {})
    if not isinstance(kinds, dict) or any(
        not isinstance(k, str) or not isinstance(v, str) for k, v in kinds.items()
    ):
        raise errors.ConfigError("covariate_kinds must map column names to kind strings")

    cutpoints: dict[str, tuple[float, ...]] = {}
    raw_cuts = doc.get("cutpoints", {})
    if not isinstance(raw_cuts, dict):
        raise errors.ConfigError("cutpoints must map variable names to edge lists")
    for name, edges in raw_cuts.items():
        if (
            not isinstance(edges, list) or len(edges) < 2
            or any(not isinstance(e, (int, float)) or isinstance(e, bool) for e in edges)
            or any(edges[i] >= edges[i + 1] for i in range(len(edges) - 1))
        ):
            raise errors.ConfigError(f"cutpoints for {name!r} must be an ascending list of >=2 numbers")
        cutpoints[name] = tuple(float(e) for e in edges)

    weights = doc.get("actor_weights", list(DEFAULT_ACTOR_WEIGHTS))
    if (
        not isinstance(weights, list) or len(weights) != 3
        or any(not isinstance(w, (int, float)) or isinstance(w, bool) or w < 0 for w in weights)
    ):
        raise errors.ConfigError("actor_weights must be three nonnegative numbers")

    cfg = ScenarioConfig(
        treatment_label=a_str("treatment_label"),
        control_label=a_str("control_label"),
        dependent_label=a_str("dependent_label"),
        hook_question=a_str("hook_question"),
        region_name=a_str("region_name"),
        background=a_str("background"),
        data_source=a_str("data_source"),
        references=tuple(references),
        effect_units_phrase=a_str("effect_units_phrase", "per intervention") or "per intervention",
        color_theme=theme,
        tile_url_template=tile,
        seed=seed,
        covariate_kinds=dict(kinds),
        cutpoints=cutpoints,
        actor_weights=(float(weights[0]), float(weights[1]), float(weights[2])),
    )
    render_template(cfg.hook_question, cfg)  # hook must resolve at parse time
    return cfg
