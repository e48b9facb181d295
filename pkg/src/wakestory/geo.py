"""Geodesic distance and exact radius queries over dependent events.

Distances use the haversine formula on a sphere of mean radius 6371.0088 km.
The grid index only prunes candidates; a final haversine test decides
membership, so query results are exactly the brute-force set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import RadiusExceedsIndex

if TYPE_CHECKING:
    from .dataset import DependentEvent, GeoPoint

EARTH_RADIUS_KM = 6371.0088
KM_PER_DEG = math.pi * EARTH_RADIUS_KM / 180.0


def _hav_rad(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance in km; all arguments in radians."""
    s_lat = math.sin((lat2 - lat1) / 2.0)
    s_lon = math.sin((lon2 - lon1) / 2.0)
    h = s_lat * s_lat + math.cos(lat1) * math.cos(lat2) * s_lon * s_lon
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_km(a: "GeoPoint", b: "GeoPoint") -> float:
    return _hav_rad(
        math.radians(a.lat), math.radians(a.lon),
        math.radians(b.lat), math.radians(b.lon),
    )


@dataclass(frozen=True)
class SpatialIndex:
    """Uniform lat/lon bucket grid over dependent events.

    Cell size is r_max converted to degrees at the dataset's median latitude;
    longitude buckets wrap at the antimeridian. Immutable after build.
    """

    r_max: float
    events: tuple["DependentEvent", ...]
    ids: tuple[str, ...]
    lats_rad: tuple[float, ...]
    lons_rad: tuple[float, ...]
    dlat_deg: float
    dlon_deg: float
    n_lat: int
    n_lon: int
    buckets: dict[tuple[int, int], tuple[int, ...]]
    by_id: dict[str, "DependentEvent"]

    def _row(self, lat_deg: float) -> int:
        i = int((lat_deg + 90.0) / self.dlat_deg)
        return min(max(i, 0), self.n_lat - 1)

    def _col(self, lon_deg: float) -> int:
        return int((lon_deg + 180.0) / self.dlon_deg) % self.n_lon


def build_index(events: list["DependentEvent"], r_max: float) -> SpatialIndex:
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    lats = sorted(e.loc.lat for e in events)
    median_lat = lats[(len(lats) - 1) // 2] if lats else 0.0

    # cell sizes snap to even divisors of the sphere so that a longitude and
    # its wrap land in consistent cells; cells only ever grow, which keeps the
    # pruning conservative
    dlat_want = r_max / KM_PER_DEG
    dlon_want = r_max / (KM_PER_DEG * max(math.cos(math.radians(median_lat)), 0.01))
    n_lat = max(1, math.floor(180.0 / dlat_want))
    n_lon = max(1, math.floor(360.0 / dlon_want))
    dlat = 180.0 / n_lat
    dlon = 360.0 / n_lon

    def row(lat_deg: float) -> int:
        return min(max(int((lat_deg + 90.0) / dlat), 0), n_lat - 1)

    def col(lon_deg: float) -> int:
        return int((lon_deg + 180.0) / dlon) % n_lon

    grouped: dict[tuple[int, int], list[int]] = {}
    for i, e in enumerate(events):
        grouped.setdefault((row(e.loc.lat), col(e.loc.lon)), []).append(i)

    return SpatialIndex(
        r_max=r_max,
        events=tuple(events),
        ids=tuple(e.id for e in events),
        lats_rad=tuple(math.radians(e.loc.lat) for e in events),
        lons_rad=tuple(math.radians(e.loc.lon) for e in events),
        dlat_deg=dlat,
        dlon_deg=dlon,
        n_lat=n_lat,
        n_lon=n_lon,
        buckets={k: tuple(v) for k, v in grouped.items()},
        by_id={e.id: e for e in events},
    )


def query_radius_with_distance(
    index: SpatialIndex, center: "GeoPoint", r: float
) -> list[tuple[str, float]]:
    """(id, distance_km) for every event within r km of center, sorted by id."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r > index.r_max:
        raise RadiusExceedsIndex(r, index.r_max)
    if not index.ids:
        return []

    lat0 = math.radians(center.lat)
    lon0 = math.radians(center.lon)
    delta = r / EARTH_RADIUS_KM  # angular radius

    # conservative bounding box; margin covers floating-point rounding
    margin = 1e-9 + delta * 1e-9
    dphi_deg = math.degrees(delta + margin)
    rows = range(index._row(center.lat - dphi_deg), index._row(center.lat + dphi_deg) + 1)

    if abs(lat0) + delta + margin >= math.pi / 2:
        cols: list[int] = list(range(index.n_lon))  # circle covers a pole
    else:
        s = math.sin(delta + margin) / math.cos(lat0)
        if s >= 1.0:
            cols = list(range(index.n_lon))
        else:
            dlam_deg = math.degrees(math.asin(s)) + 1e-9
            j0 = math.floor((center.lon - dlam_deg + 180.0) / index.dlon_deg)
            j1 = math.floor((center.lon + dlam_deg + 180.0) / index.dlon_deg)
            if j1 - j0 + 1 >= index.n_lon:
                cols = list(range(index.n_lon))
            else:
                cols = sorted({j % index.n_lon for j in range(j0, j1 + 1)})

    hits: list[tuple[str, float]] = []
    for i_lat in rows:
        for j_lon in cols:
            for k in index.buckets.get((i_lat, j_lon), ()):
                d = _hav_rad(lat0, lon0, index.lats_rad[k], index.lons_rad[k])
                if d <= r:
                    hits.append((index.ids[k], d))
    hits.sort()
    return hits


def query_radius(index: SpatialIndex, center: "GeoPoint", r: float) -> list[str]:
    """Ids of all events within r km of center, sorted."""
    return [id_ for id_, _ in query_radius_with_distance(index, center, r)]
