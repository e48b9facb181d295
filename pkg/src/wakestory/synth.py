"""Synthetic event data with a known injected effect, for testing and demos.

A homogeneous Poisson background of dependent events fills a box over a fixed
day span; treatment and control sites land uniformly in the same box. Each
treatment site optionally injects Poisson-distributed extra dependent events
inside a disc and a post-intervention day range, so the true effect at the
matching window is the injection mean. The seed drives everything; analysis
itself never consumes randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .dataset import (Arm, CovariateSchema, DependentEvent, GeoPoint,
                      InterventionEvent, Kind)
from .geo import EARTH_RADIUS_KM


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    start: date = date(2020, 1, 1)
    days: int = 365
    lon0: float = 62.0
    lat0: float = 31.0
    box_deg: float = 10.0
    background_mean: float = 2000.0
    n_treatment: int = 100
    n_control: int = 100
    inject_mean: float = 3.0
    inject_radius_km: float = 10.0
    inject_day_lo: int = 1
    inject_day_hi: int = 20
    binary_covariates: tuple[str, ...] = ()
    continuous_covariates: tuple[str, ...] = ()


def destination(origin: GeoPoint, bearing_rad: float, distance_km: float) -> GeoPoint:
    """Point at a geodesic distance and bearing from origin (sphere)."""
    delta = distance_km / EARTH_RADIUS_KM
    phi1 = math.radians(origin.lat)
    lam1 = math.radians(origin.lon)
    phi2 = math.asin(math.sin(phi1) * math.cos(delta)
                     + math.cos(phi1) * math.sin(delta) * math.cos(bearing_rad))
    lam2 = lam1 + math.atan2(
        math.sin(bearing_rad) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * math.sin(phi2),
    )
    lon = math.degrees(lam2)
    lon = (lon + 180.0) % 360.0 - 180.0
    return GeoPoint(lon=lon, lat=math.degrees(phi2))


def generate(spec: SynthSpec) -> tuple[list[InterventionEvent], list[DependentEvent], CovariateSchema]:
    rng = np.random.default_rng(spec.seed)

    def uniform_point() -> GeoPoint:
        return GeoPoint(
            lon=float(spec.lon0 + rng.uniform(0.0, spec.box_deg)),
            lat=float(spec.lat0 + rng.uniform(0.0, spec.box_deg)),
        )

    def uniform_day() -> date:
        return spec.start + timedelta(days=int(rng.integers(0, spec.days)))

    names = spec.binary_covariates + spec.continuous_covariates
    kinds = (Kind.BINARY,) * len(spec.binary_covariates) + \
            (Kind.CONTINUOUS,) * len(spec.continuous_covariates)
    schema = CovariateSchema(names=names, kinds=kinds)

    def covariates() -> tuple[float, ...]:
        vals = [float(rng.integers(0, 2)) for _ in spec.binary_covariates]
        vals += [round(float(rng.uniform(0.0, 100.0)), 3) for _ in spec.continuous_covariates]
        return tuple(vals)

    interventions: list[InterventionEvent] = []
    for i in range(spec.n_treatment):
        interventions.append(InterventionEvent(
            id=f"T{i + 1:04d}", date=uniform_day(), loc=uniform_point(),
            arm=Arm.TREATMENT, covariates=covariates()))
    for i in range(spec.n_control):
        interventions.append(InterventionEvent(
            id=f"C{i + 1:04d}", date=uniform_day(), loc=uniform_point(),
            arm=Arm.CONTROL, covariates=covariates()))

    dependents: list[DependentEvent] = []
    n_background = int(rng.poisson(spec.background_mean))
    for i in range(n_background):
        dependents.append(DependentEvent(
            id=f"D{i + 1:05d}", date=uniform_day(), loc=uniform_point()))

    if spec.inject_mean > 0:
        k = len(dependents)
        for iv in interventions:
            if iv.arm is not Arm.TREATMENT:
                continue
            for _ in range(int(rng.poisson(spec.inject_mean))):
                k += 1
                bearing = float(rng.uniform(0.0, 2.0 * math.pi))
                dist = spec.inject_radius_km * math.sqrt(float(rng.uniform(0.0, 1.0)))
                offset = int(rng.integers(spec.inject_day_lo, spec.inject_day_hi + 1))
                dependents.append(DependentEvent(
                    id=f"D{k:05d}",
                    date=iv.date + timedelta(days=offset),
                    loc=destination(iv.loc, bearing, dist)))

    return interventions, dependents, schema
