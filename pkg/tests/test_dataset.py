import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wakestory import errors
from wakestory.dataset import (DEFAULT_ACTOR_WEIGHTS, DEFAULT_THEME, Arm, Kind,
                               apply_kind_overrides, dependents_to_csv,
                               interventions_to_csv, parse_dependent,
                               parse_interventions, parse_scenario,
                               validate_dataset)
from wakestory.wake import make_grid

from conftest import day, dep, iv, schema_of, small_grid


def test_minimal_treatment_row():
    events, schema = parse_interventions(
        b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,33.0,treatment\n")
    assert len(events) == 1
    assert events[0].arm is Arm.TREATMENT
    assert events[0].covariates == ()
    assert len(schema) == 0


def test_binary_kind_inference():
    csv = (b"id,date,lon,lat,arm,road_nearby,pashtun_region,hazara_region,is_urban\n"
           b"I1,2010-01-05,65.0,33.0,treatment,0,1,0,1\n"
           b"I2,2010-02-05,65.5,33.5,control,1,1,0,0\n")
    events, schema = parse_interventions(csv)
    assert schema.names == ("road_nearby", "pashtun_region", "hazara_region", "is_urban")
    assert schema.kinds == (Kind.BINARY,) * 4


def test_continuous_kind_inference():
    csv = (b"id,date,lon,lat,arm,flag,population\n"
           b"I1,2010-01-05,65.0,33.0,treatment,0,123.5\n"
           b"I2,2010-02-05,65.5,33.5,control,1,88.25\n")
    _, schema = parse_interventions(csv)
    assert schema.kinds == (Kind.BINARY, Kind.CONTINUOUS)


def test_kind_inference_is_order_independent():
    rows = [f"I{i},2010-01-{i + 1:02d},65.0,33.0,treatment,{i % 2},{i * 1.5}"
            for i in range(8)]
    header = "id,date,lon,lat,arm,b,c"
    base = ("\n".join([header] + rows) + "\n").encode()
    rng = random.Random(0)
    for _ in range(5):
        rng.shuffle(rows)
        shuffled = ("\n".join([header] + rows) + "\n").encode()
        assert parse_interventions(shuffled)[1] == parse_interventions(base)[1]


def test_arm_is_case_insensitive():
    events, _ = parse_interventions(
        b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,33.0,Treatment\n"
        b"I2,2010-01-06,65.0,33.0,CONTROL\n")
    assert [e.arm for e in events] == [Arm.TREATMENT, Arm.CONTROL]


def test_rejected_arm_token():
    with pytest.raises(errors.BadArm):
        parse_interventions(b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,33.0,treated\n")


@pytest.mark.parametrize("csv,err", [
    (b"id,lat,lon,date,arm\n", errors.MalformedHeader),
    (b"id,date,lon,lat,arm\nI1,2010-13-05,65.0,33.0,treatment\n", errors.BadDate),
    (b"id,date,lon,lat,arm\nI1,05-01-2010,65.0,33.0,treatment\n", errors.BadDate),
    (b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,91.0,treatment\n", errors.BadCoordinate),
    (b"id,date,lon,lat,arm\nI1,2010-01-05,181.0,33.0,treatment\n", errors.BadCoordinate),
    (b"id,date,lon,lat,arm\nI1,2010-01-05,nan,33.0,treatment\n", errors.BadCoordinate),
    (b"id,date,lon,lat,arm,x\nI1,2010-01-05,65.0,33.0,treatment,abc\n",
     errors.NonNumericCovariate),
    (b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,33.0,treatment\n"
     b"I1,2010-01-06,65.0,33.0,control\n", errors.DuplicateId),
    (b"id,date,lon,lat,arm\n,2010-01-05,65.0,33.0,treatment\n", errors.EmptyId),
    (b"id,date,lon,lat,arm\nI1,2010-01-05,65.0,33.0\n", errors.RowWidth),
    (b"\xff\xfe zzz", errors.BadEncoding),
], ids=["header", "baddate", "dateformat", "lat-range", "lon-range", "nan-coord",
        "covariate", "dup-id", "empty-id", "row-width", "encoding"])
def test_intervention_parse_errors(csv, err):
    with pytest.raises(err):
        parse_interventions(csv)


def test_embedded_comma_is_a_width_error():
    # no quoting: a comma inside a field changes the column count
    with pytest.raises(errors.RowWidth):
        parse_dependent(b'id,date,lon,lat\n"a,b",2010-01-05,65.0,33.0\n')


def test_dependent_empty_body():
    assert parse_dependent(b"id,date,lon,lat\n") == []


def test_dependent_lat_out_of_range():
    with pytest.raises(errors.BadCoordinate):
        parse_dependent(b"id,date,lon,lat\nD1,2010-01-05,65.0,91.0\n")


def test_dependent_rows_keep_file_order():
    events = parse_dependent(
        b"id,date,lon,lat\nD3,2010-01-05,65.0,33.0\nD1,2010-01-06,65.1,33.1\n"
        b"D2,2010-01-07,65.2,33.2\n")
    assert [e.id for e in events] == ["D3", "D1", "D2"]


def test_crlf_and_bom_accepted():
    events = parse_dependent(
        "﻿id,date,lon,lat\r\nD1,2010-01-05,65.0,33.0\r\n".encode("utf-8"))
    assert [e.id for e in events] == ["D1"]


def test_validate_requires_both_arms_and_dependents():
    g = small_grid()
    deps = [dep("D1", 50, 65.0, 33.0)]
    with pytest.raises(errors.NoTreatment):
        validate_dataset([iv("C1", 50, 65.0, 33.0, "control")], deps, schema_of(), g)
    with pytest.raises(errors.NoControl):
        validate_dataset([iv("T1", 50, 65.0, 33.0, "treatment")], deps, schema_of(), g)
    with pytest.raises(errors.NoDependent):
        validate_dataset([iv("T1", 50, 65.0, 33.0, "treatment"),
                          iv("C1", 50, 65.0, 33.0, "control")], [], schema_of(), g)


def test_truncation_flag_near_extent_boundary():
    g = small_grid()  # t_max = 30
    interventions = [iv("T1", 3, 65.0, 33.0, "treatment"),
                     iv("C1", 50, 65.0, 33.0, "control")]
    deps = [dep("D1", 0, 65.0, 33.0), dep("D2", 100, 65.0, 33.0)]
    ds = validate_dataset(interventions, deps, schema_of(), g)
    assert "T1" in ds.truncated  # 3 - 30 < 0: window leaves the extent
    assert "C1" not in ds.truncated
    assert len(ds.warnings) == 1 and "T1" in ds.warnings[0]


def test_interior_data_has_no_warnings():
    g = small_grid()
    interventions = [iv("T1", 50, 65.0, 33.0, "treatment"),
                     iv("C1", 60, 65.0, 33.0, "control")]
    deps = [dep("D1", 0, 65.0, 33.0), dep("D2", 100, 65.0, 33.0)]
    ds = validate_dataset(interventions, deps, schema_of(), g)
    assert ds.warnings == () and ds.truncated == frozenset()
    assert ds.extent == (day(0), day(100))


def test_validate_enforces_schema_invariants():
    g = small_grid()
    deps = [dep("D1", 0, 65.0, 33.0), dep("D2", 100, 65.0, 33.0)]
    schema = schema_of(("b", "binary"))
    short = [iv("T1", 50, 65.0, 33.0, "treatment"),  # missing covariate
             iv("C1", 50, 65.0, 33.0, "control", (0.0,))]
    with pytest.raises(errors.SchemaMismatch):
        validate_dataset(short, deps, schema, g)
    nonbinary = [iv("T1", 50, 65.0, 33.0, "treatment", (2.0,)),
                 iv("C1", 50, 65.0, 33.0, "control", (0.0,))]
    with pytest.raises(errors.SchemaMismatch):
        validate_dataset(nonbinary, deps, schema, g)


def test_odd_half_width_rejected():
    with pytest.raises(errors.OddHalfWidth):
        make_grid([5.0], [5, 10])
    with pytest.raises(errors.OddHalfWidth):
        make_grid([5.0], [0])


def test_grid_must_increase():
    with pytest.raises(errors.BadGrid):
        make_grid([5.0, 5.0], [10])
    with pytest.raises(errors.BadGrid):
        make_grid([5.0], [20, 10])
    with pytest.raises(errors.BadGrid):
        make_grid([], [10])


def test_roundtrip_reserialization():
    csv = (b"id,date,lon,lat,arm,road_nearby,population\n"
           b"I1,2010-01-05,65.125,33.5,treatment,0,123.5\n"
           b"I2,2010-02-05,-65.5,-33.25,control,1,88.25\n")
    events, schema = parse_interventions(csv)
    again, schema2 = parse_interventions(interventions_to_csv(events, schema))
    assert again == events and schema2 == schema

    dcsv = b"id,date,lon,lat\nD1,2010-01-05,65.0,33.0\nD2,2010-01-06,-179.9,-89.0\n"
    deps = parse_dependent(dcsv)
    assert parse_dependent(dependents_to_csv(deps)) == deps


FIELD_CORRUPTIONS = [
    (0, "", errors.EmptyId),
    (1, "2010-1-5", errors.BadDate),
    (1, "not-a-date", errors.BadDate),
    (2, "300", errors.BadCoordinate),
    (2, "east", errors.BadCoordinate),
    (3, "-95", errors.BadCoordinate),
    (4, "both", errors.BadArm),
    (5, "high", errors.NonNumericCovariate),
    (5, "inf", errors.NonNumericCovariate),
]


@settings(max_examples=60, deadline=None)
@given(row_i=st.integers(0, 3), corruption=st.sampled_from(FIELD_CORRUPTIONS))
def test_single_field_corruption_is_always_caught(row_i, corruption):
    col, bad, err = corruption
    rows = [["I%d" % i, "2010-03-%02d" % (i + 1), "65.0", "33.0",
             "treatment" if i % 2 else "control", "0.5"] for i in range(4)]
    rows[row_i][col] = bad
    csv = ("id,date,lon,lat,arm,x\n"
           + "\n".join(",".join(r) for r in rows) + "\n").encode()
    with pytest.raises(err):
        parse_interventions(csv)


def test_kind_override():
    csv = (b"id,date,lon,lat,arm,flag\n"
           b"I1,2010-01-05,65.0,33.0,treatment,0\n"
           b"I2,2010-02-05,65.5,33.5,control,1\n")
    events, schema = parse_interventions(csv)
    assert schema.kinds == (Kind.BINARY,)
    forced = apply_kind_overrides(schema, events, {"flag": "continuous"})
    assert forced.kinds == (Kind.CONTINUOUS,)
    with pytest.raises(errors.ConfigError):
        apply_kind_overrides(schema, events, {"missing": "binary"})


# --- scenario.json ------------------------------------------------------------

SCENARIO_MIN = {
    "treatment_label": "Aid projects excluding parts of the community",
    "control_label": "Aid projects benefiting the whole community",
    "dependent_label": "insurgent activities",
    "hook_question": "What is the impact of {treatment_label} on {dependent_label}?",
}


def as_json(doc: dict) -> bytes:
    import json
    return json.dumps(doc).encode()


def test_scenario_minimal_defaults():
    cfg = parse_scenario(as_json(SCENARIO_MIN))
    assert cfg.effect_units_phrase == "per intervention"
    assert cfg.color_theme == DEFAULT_THEME
    assert cfg.actor_weights == DEFAULT_ACTOR_WEIGHTS
    assert cfg.seed == 0 and cfg.tile_url_template is None


def test_scenario_unknown_key_rejected():
    doc = dict(SCENARIO_MIN, extra_field="nope")
    with pytest.raises(errors.UnknownConfigKey):
        parse_scenario(as_json(doc))


def test_scenario_empty_label_rejected():
    doc = dict(SCENARIO_MIN, treatment_label="")
    with pytest.raises(errors.ConfigError):
        parse_scenario(as_json(doc))


def test_scenario_hook_must_resolve():
    doc = dict(SCENARIO_MIN, hook_question="Effects in {region_name}?")
    with pytest.raises(errors.UnresolvedPlaceholder):
        parse_scenario(as_json(doc))  # region_name defaults to empty
    doc["region_name"] = "Afghanistan"
    parse_scenario(as_json(doc))  # resolvable now


def test_scenario_theme_requires_core_roles():
    doc = dict(SCENARIO_MIN, color_theme={"treatment": "#111", "control": "#222"})
    with pytest.raises(errors.MissingThemeRole):
        parse_scenario(as_json(doc))


def test_scenario_cutpoints_validated():
    doc = dict(SCENARIO_MIN, cutpoints={"x": [3.0, 1.0]})
    with pytest.raises(errors.ConfigError):
        parse_scenario(as_json(doc))
    doc = dict(SCENARIO_MIN, cutpoints={"x": [0.0, 1.0, 5.0]})
    assert parse_scenario(as_json(doc)).cutpoints == {"x": (0.0, 1.0, 5.0)}
