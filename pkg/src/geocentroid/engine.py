"""Per-publication centroids and mergeable per-period accumulators.

Two averaging modes are supported. ``planar`` takes arithmetic means of
latitude and longitude in degrees, exactly as the usual centre-of-mass
formulation does. ``spherical`` averages 3D unit vectors instead, which
behaves correctly across the antimeridian and near the poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from geocentroid.ingest import ResolvedPublication
from geocentroid.weighting import ContributionWeight

PLANAR = "planar"
SPHERICAL = "spherical"
MODES = (PLANAR, SPHERICAL)

DEGENERATE_NORM = 1e-12


class DegenerateCentroidError(ArithmeticError):
    """The weighted unit-vector mean has (numerically) zero length."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown centroid mode {mode!r} (expected one of {MODES})")
    return mode


class CompensatedSum:
    """Running sum with Neumaier error compensation; mergeable."""

    __slots__ = ("total", "comp")

    def __init__(self, total: float = 0.0, comp: float = 0.0):
        self.total = total
        self.comp = comp

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    def merge(self, other: "CompensatedSum") -> None:
        self.add(other.total)
        self.comp += other.comp

    @property
    def value(self) -> float:
        return self.total + self.comp

    def copy(self) -> "CompensatedSum":
        return CompensatedSum(self.total, self.comp)

    def __repr__(self) -> str:
        return f"CompensatedSum({self.value!r})"


def to_unit_vector(lat: float, lon: float) -> tuple[float, float, float]:
    phi = math.radians(lat)
    lam = math.radians(lon)
    c = math.cos(phi)
    return c * math.cos(lam), c * math.sin(lam), math.sin(phi)


def from_vector(x: float, y: float, z: float) -> tuple[float, float]:
    norm = math.sqrt(x * x + y * y + z * z)
    if norm < DEGENERATE_NORM:
        raise DegenerateCentroidError("vector mean has zero length")
    lat = math.degrees(math.atan2(z, math.hypot(x, y)))
    lon = math.degrees(math.atan2(y, x))
    return lat, lon


class PubCentroid(NamedTuple):
    pub_id: str
    latitude: float
    longitude: float
    weight: float


def publication_centroid(
    pub: ResolvedPublication,
    weights: Sequence[ContributionWeight],
    mode: str = PLANAR,
    pub_weight: float = 1.0,
) -> PubCentroid:
    """Contribution-weighted centroid of one publication's organizations.

    Raises :class:`DegenerateCentroidError` for a spherical mean that
    cancels out (e.g. two antipodal organizations), and ``ValueError`` when
    ``weights`` is empty.
    """
    if not weights:
        raise ValueError("publication has no contribution weights")
    pub_id = pub.pub_id
    lats = [w.org.latitude for w in weights]
    lons = [w.org.longitude for w in weights]
    lat_lo, lat_hi = min(lats), max(lats)
    lon_lo, lon_hi = min(lons), max(lons)
    if lat_lo == lat_hi and lon_lo == lon_hi:
        # every point coincides: the mean is that point, in either mode
        return PubCentroid(pub_id, lats[0], lons[0], pub_weight)

    if mode == PLANAR:
        lat = math.fsum([w.weight * x for w, x in zip(weights, lats)])
        lon = math.fsum([w.weight * x for w, x in zip(weights, lons)])
        # weights sum to 1 only up to rounding; keep the result in the convex hull
        lat = min(max(lat, lat_lo), lat_hi)
        lon = min(max(lon, lon_lo), lon_hi)
        return PubCentroid(pub_id, lat, lon, pub_weight)

    check_mode(mode)
    sx = sy = sz = 0.0
    for w in weights:
        x, y, z = to_unit_vector(w.org.latitude, w.org.longitude)
        sx += w.weight * x
        sy += w.weight * y
        sz += w.weight * z
    lat, lon = from_vector(sx, sy, sz)
    return PubCentroid(pub_id, lat, lon, pub_weight)


@dataclass
class CentroidAccumulator:
    """Partial sums for one period.

    Planar mode uses ``s1``/``s2`` for weighted latitude/longitude; spherical
    mode uses ``s1``/``s2``/``s3`` for the weighted x/y/z unit-vector sums.
    """

    mode: str = PLANAR
    s1: CompensatedSum = field(default_factory=CompensatedSum)
    s2: CompensatedSum = field(default_factory=CompensatedSum)
    s3: CompensatedSum = field(default_factory=CompensatedSum)
    sum_w: CompensatedSum = field(default_factory=CompensatedSum)
    n_pubs: int = 0
    n_skipped: int = 0

    @property
    def total_weight(self) -> float:
        return self.sum_w.value

    @property
    def sum_w_lat(self) -> float:
        return self.s1.value

    @property
    def sum_w_long(self) -> float:
        return self.s2.value

    def add(self, c: PubCentroid) -> None:
        w = c.weight
        if w < 0:
            raise ValueError("publication weight must be non-negative")
        if w == 0:
            self.n_skipped += 1
            return
        if self.mode == PLANAR:
            self.s1.add(w * c.latitude)
            self.s2.add(w * c.longitude)
        else:
            x, y, z = to_unit_vector(c.latitude, c.longitude)
            self.s1.add(w * x)
            self.s2.add(w * y)
            self.s3.add(w * z)
        self.sum_w.add(w)
        self.n_pubs += 1

    def skip(self) -> None:
        self.n_skipped += 1

    def merge_from(self, other: "CentroidAccumulator") -> None:
        if other.mode != self.mode:
            raise ValueError(f"cannot merge {other.mode} accumulator into {self.mode}")
        self.s1.merge(other.s1)
        self.s2.merge(other.s2)
        self.s3.merge(other.s3)
        self.sum_w.merge(other.sum_w)
        self.n_pubs += other.n_pubs
        self.n_skipped += other.n_skipped

    def copy(self) -> "CentroidAccumulator":
        return CentroidAccumulator(
            self.mode, self.s1.copy(), self.s2.copy(), self.s3.copy(),
            self.sum_w.copy(), self.n_pubs, self.n_skipped,
        )


def accumulate(acc: CentroidAccumulator, c: PubCentroid) -> CentroidAccumulator:
    acc.add(c)
    return acc


def merge(a: CentroidAccumulator, b: CentroidAccumulator) -> CentroidAccumulator:
    """Return a new accumulator holding ``a`` and ``b`` combined."""
    out = a.copy()
    out.merge_from(b)
    return out


def finalize(acc: CentroidAccumulator, mode: str | None = None):
    """``(latitude, longitude, sum_w, n_pubs)`` or ``None`` if the period has no weight.

    A spherical accumulator whose vector sum cancels out also yields ``None``.
    """
    mode = acc.mode if mode is None else mode
    if mode != acc.mode:
        raise ValueError(f"accumulator is {acc.mode}, asked to finalize as {mode}")
    sw = acc.sum_w.value
    if not sw > 0:
        return None
    if mode == PLANAR:
        lat = min(max(acc.s1.value / sw, -90.0), 90.0)
        lon = min(max(acc.s2.value / sw, -180.0), 180.0)
        return lat, lon, sw, acc.n_pubs
    try:
        lat, lon = from_vector(acc.s1.value / sw, acc.s2.value / sw, acc.s3.value / sw)
    except DegenerateCentroidError:
        return None
    return lat, lon, sw, acc.n_pubs
