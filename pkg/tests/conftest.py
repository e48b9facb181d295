"""Shared builders for the test suite."""

from __future__ import annotations

import random
from datetime import date, timedelta

import pytest

from wakestory.dataset import (Arm, CovariateSchema, Dataset, DependentEvent,
                               GeoPoint, InterventionEvent, Kind, ScenarioConfig,
                               validate_dataset)
from wakestory.wake import WindowGrid, make_grid

BASE = date(2020, 1, 1)


def day(n: int) -> date:
    return BASE + timedelta(days=n)


def dep(id_: str, d: int, lon: float, lat: float) -> DependentEvent:
    return DependentEvent(id=id_, date=day(d), loc=GeoPoint(lon=lon, lat=lat))


def iv(id_: str, d: int, lon: float, lat: float, arm: str,
       covs: tuple[float, ...] = ()) -> InterventionEvent:
    return InterventionEvent(id=id_, date=day(d), loc=GeoPoint(lon=lon, lat=lat),
                             arm=Arm(arm), covariates=covs)


def schema_of(*cols: tuple[str, str]) -> CovariateSchema:
    return CovariateSchema(names=tuple(c for c, _ in cols),
                           kinds=tuple(Kind(k) for _, k in cols))


def small_grid() -> WindowGrid:
    return make_grid([5.0, 10.0, 20.0], [10, 20, 30])


def random_dataset(seed: int, n_t: int = 20, n_c: int = 20, n_dep: int = 200,
                   n_binary: int = 2, box_deg: float = 2.0, days: int = 200,
                   grid: WindowGrid | None = None) -> Dataset:
    """Clustered-enough random data: everything in a small box so wakes are
    populated. Plain `random` here on purpose — independent of the numpy
    generator the package ships."""
    rng = random.Random(seed)
    grid = grid or small_grid()

    def point() -> tuple[float, float]:
        return 60.0 + rng.random() * box_deg, 30.0 + rng.random() * box_deg

    interventions = []
    for i in range(n_t + n_c):
        lon, lat = point()
        covs = tuple(float(rng.randint(0, 1)) for _ in range(n_binary))
        interventions.append(InterventionEvent(
            id=f"I{i:03d}", date=day(rng.randint(0, days)),
            loc=GeoPoint(lon=lon, lat=lat),
            arm=Arm.TREATMENT if i < n_t else Arm.CONTROL, covariates=covs))
    dependents = []
    for i in range(n_dep):
        lon, lat = point()
        dependents.append(DependentEvent(
            id=f"D{i:04d}", date=day(rng.randint(0, days)),
            loc=GeoPoint(lon=lon, lat=lat)))
    schema = CovariateSchema(names=tuple(f"b{j}" for j in range(n_binary)),
                             kinds=(Kind.BINARY,) * n_binary)
    return validate_dataset(interventions, dependents, schema, grid)


@pytest.fixture
def ea_config() -> ScenarioConfig:
    return ScenarioConfig(
        treatment_label="Aid projects excluding parts of the community",
        control_label="Aid projects benefiting the whole community",
        dependent_label="insurgent activities",
        region_name="Afghanistan",
        hook_question=("What is the impact of aid projects excluding parts of a "
                       "community on insurgent activities in {region_name}?"),
        background=("Aid allocation in conflict zones is contested: does excluding "
                    "parts of a community provoke a backlash?"),
        data_source="synthetic demonstration data",
        references=["https://example.org/aid-and-insurgency"],
        seed=7,
    )
