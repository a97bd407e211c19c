"""CSV, GeoJSON and SVG serialization of trajectories and period statistics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence
from xml.sax.saxutils import escape, quoteattr

from geocentroid import __version__
from geocentroid.trajectory import PeriodStats, TrajectoryPoint, parse_period

TRAJECTORY_HEADER = ["period", "latitude", "longitude", "n_pubs", "total_weight", "robust"]
STATS_HEADER = ["period", "total", "contributing", "skipped"]


class BaseMapError(ValueError):
    """The base-map GeoJSON could not be read or is structurally invalid."""


def format_weight(w: float) -> str:
    if math.isfinite(w) and w == int(w) and abs(w) < 1e15:
        return str(int(w))
    return repr(float(w))


# -- CSV ---------------------------------------------------------------------


def write_csv(points: Iterable[TrajectoryPoint], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for p in points:
        writer.writerow([
            str(p.period),
            f"{p.latitude:.6f}",
            f"{p.longitude:.6f}",
            p.n_pubs,
            format_weight(p.total_weight),
            "true" if p.robust else "false",
        ])


def write_stats_csv(stats: Iterable[PeriodStats], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    for s in stats:
        writer.writerow([str(s.period), s.n_records_total, s.n_records_contributing, s.n_records_skipped])


def trajectory_csv(points: Iterable[TrajectoryPoint]) -> bytes:
    buf = io.StringIO()
    write_csv(points, buf)
    return buf.getvalue().encode("utf-8")


def stats_csv(stats: Iterable[PeriodStats]) -> bytes:
    buf = io.StringIO()
    write_stats_csv(stats, buf)
    return buf.getvalue().encode("utf-8")


def read_csv(src: IO[str]) -> list[TrajectoryPoint]:
    """Parse a trajectory CSV written by :func:`write_csv`."""
    reader = csv.reader(src)
    header = next(reader, None)
    if header != TRAJECTORY_HEADER:
        raise ValueError(f"unexpected trajectory header {header!r}")
    points = []
    for row in reader:
        if not row:
            continue
        period, lat, lon, n, w, robust = row
        if robust not in ("true", "false"):
            raise ValueError(f"bad robust flag {robust!r} on line {reader.line_num}")
        points.append(TrajectoryPoint(
            parse_period(period), float(lat), float(lon), int(n), float(w), robust == "true",
        ))
    return points


def read_stats_csv(src: IO[str]) -> list[PeriodStats]:
    reader = csv.reader(src)
    header = next(reader, None)
    if header != STATS_HEADER:
        raise ValueError(f"unexpected stats header {header!r}")
    return [
        PeriodStats(parse_period(r[0]), int(r[1]), int(r[2]), int(r[3]))
        for r in reader
        if r
    ]


# -- GeoJSON -----------------------------------------------------------------


def crosses_antimeridian(points: Sequence[TrajectoryPoint]) -> bool:
    return any(
        abs(b.longitude - a.longitude) > 180.0 for a, b in zip(points, points[1:])
    )


def geojson_document(points: Sequence[TrajectoryPoint], metadata: dict | None = None) -> dict:
    """FeatureCollection with one Point per period plus the connecting LineString."""
    points = sorted(points, key=lambda p: p.period)
    features = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [p.longitude, p.latitude]},
            "properties": {
                "period": str(p.period),
                "n_pubs": p.n_pubs,
                "total_weight": p.total_weight,
                "robust": p.robust,
            },
        }
        for p in points
    ]
    if len(points) >= 2:
        features.append({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [[p.longitude, p.latitude] for p in points],
            },
            "properties": {
                "kind": "trajectory",
                "from": str(points[0].period),
                "to": str(points[-1].period),
                "crosses_antimeridian": crosses_antimeridian(points),
            },
        })
    props = {"tool": "geocentroid", "version": __version__}
    props.update(metadata or {})
    return {"type": "FeatureCollection", "properties": props, "features": features}


def write_geojson(points: Sequence[TrajectoryPoint], metadata: dict | None, out: IO[str]) -> None:
    json.dump(geojson_document(points, metadata), out, indent=2, allow_nan=False)
    out.write("\n")


def trajectory_geojson(points: Sequence[TrajectoryPoint], metadata: dict | None = None) -> bytes:
    buf = io.StringIO()
    write_geojson(points, metadata, buf)
    return buf.getvalue().encode("utf-8")


# -- SVG ---------------------------------------------------------------------


@dataclass(frozen=True)
class RenderOptions:
    width: int = 1000
    height: int = 500
    show_labels: bool = True
    label_every: int = 10
    base_map: str | None = None
    robust_color: str = "#d62728"
    nonrobust_color: str = "#8c8c8c"
    line_color: str = "#404040"
    marker_radius: float = 3.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        if self.label_every < 1:
            raise ValueError("label_every must be at least 1")


def project(lat: float, lon: float, width: float, height: float) -> tuple[float, float]:
    """Equirectangular projection of (lat, lon) degrees into pixel space."""
    return (lon + 180.0) / 360.0 * width, (90.0 - lat) / 180.0 * height


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _geometries(obj, where="base map"):
    if not isinstance(obj, dict) or "type" not in obj:
        raise BaseMapError(f"{where}: expected a GeoJSON object with a 'type'")
    kind = obj["type"]
    if kind == "FeatureCollection":
        feats = obj.get("features")
        if not isinstance(feats, list):
            raise BaseMapError(f"{where}: FeatureCollection without a features list")
        for i, f in enumerate(feats):
            yield from _geometries(f, f"{where}: feature {i}")
    elif kind == "Feature":
        geom = obj.get("geometry")
        if geom is not None:
            yield from _geometries(geom, where)
    elif kind == "GeometryCollection":
        geoms = obj.get("geometries")
        if not isinstance(geoms, list):
            raise BaseMapError(f"{where}: GeometryCollection without geometries")
        for g in geoms:
            yield from _geometries(g, where)
    elif kind in ("Polygon", "MultiPolygon", "LineString", "MultiLineString"):
        if "coordinates" not in obj:
            raise BaseMapError(f"{where}: {kind} without coordinates")
        yield kind, obj["coordinates"], where
    elif kind in ("Point", "MultiPoint"):
        return
    else:
        raise BaseMapError(f"{where}: unsupported GeoJSON type {kind!r}")


def _lines_of(kind, coords, where):
    try:
        if kind == "LineString":
            return [coords], False
        if kind == "MultiLineString":
            return list(coords), False
        if kind == "Polygon":
            return list(coords), True
        return [ring for poly in coords for ring in poly], True
    except TypeError:
        raise BaseMapError(f"{where}: malformed {kind} coordinates") from None


def base_map_paths(path: str, width: float, height: float) -> list[str]:
    """SVG path data for every line or ring of a world-outline GeoJSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise BaseMapError(f"cannot read base map {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise BaseMapError(f"base map {path} is not valid JSON: {exc}") from None
    out = []
    for kind, coords, where in _geometries(doc):
        lines, closed = _lines_of(kind, coords, where)
        for line in lines:
            parts = []
            try:
                for pos in line:
                    lon, lat = float(pos[0]), float(pos[1])
                    x, y = project(lat, lon, width, height)
                    parts.append(f"{_num(x)},{_num(y)}")
            except (TypeError, ValueError, IndexError):
                raise BaseMapError(f"{where}: malformed position in {kind}") from None
            if not parts:
                continue
            d = "M" + " L".join(parts)
            out.append(d + " Z" if closed else d)
    return out


def render_svg(
    points: Sequence[TrajectoryPoint],
    options: RenderOptions | None = None,
    metadata: dict | None = None,
) -> bytes:
    """Self-contained SVG 1.1 map of a trajectory, deterministic for fixed input."""
    opt = options or RenderOptions()
    w, h = opt.width, opt.height
    points = sorted(points, key=lambda p: p.period)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        "<title>Centre-of-mass trajectory</title>",
    ]
    if metadata:
        desc = "; ".join(f"{k}={v}" for k, v in metadata.items())
        out.append(f"<desc>{escape(desc)}</desc>")
    out.append(f'<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')

    if opt.base_map:
        out.append('<g class="base-map" fill="#eeeeee" stroke="#bbbbbb" stroke-width="0.5">')
        for d in base_map_paths(opt.base_map, w, h):
            out.append(f'<path d="{d}"/>')
        out.append("</g>")

    # graticule every 30 degrees
    out.append('<g class="graticule" stroke="#dddddd" stroke-width="0.5">')
    for lon in range(-180, 181, 30):
        x, _ = project(0.0, lon, w, h)
        out.append(f'<line x1="{_num(x)}" y1="0" x2="{_num(x)}" y2="{h}"/>')
    for lat in range(-90, 91, 30):
        _, y = project(lat, 0.0, w, h)
        out.append(f'<line x1="0" y1="{_num(y)}" x2="{w}" y2="{_num(y)}"/>')
    out.append("</g>")

    xy = [project(p.latitude, p.longitude, w, h) for p in points]
    if len(xy) >= 2:
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in xy)
        out.append(
            f'<polyline class="trajectory" points="{pts}" fill="none" '
            f'stroke={quoteattr(opt.line_color)} stroke-width="1"/>'
        )

    out.append('<g class="markers">')
    for p, (x, y) in zip(points, xy):
        color = opt.robust_color if p.robust else opt.nonrobust_color
        cls = "marker robust" if p.robust else "marker nonrobust"
        out.append(
            f'<circle class="{cls}" cx="{_num(x)}" cy="{_num(y)}" r="{_num(opt.marker_radius)}" '
            f'fill={quoteattr(color)}><title>{escape(str(p.period))}</title></circle>'
        )
    out.append("</g>")

    if opt.show_labels and points:
        out.append('<g class="labels" font-family="sans-serif" font-size="10" fill="#202020">')
        last = len(points) - 1
        for i, (p, (x, y)) in enumerate(zip(points, xy)):
            if i % opt.label_every == 0 or i == last:
                out.append(
                    f'<text x="{_num(x + opt.marker_radius + 2)}" y="{_num(y - 2)}">'
                    f"{escape(str(p.period))}</text>"
                )
        out.append("</g>")

    out.append(
        '<g class="legend" font-family="sans-serif" font-size="10">'
        f'<rect x="10" y="{h - 34}" width="8" height="8" fill={quoteattr(opt.robust_color)}/>'
        f'<text x="22" y="{h - 26}">more robust</text>'
        f'<rect x="10" y="{h - 20}" width="8" height="8" fill={quoteattr(opt.nonrobust_color)}/>'
        f'<text x="22" y="{h - 12}">less robust</text>'
        "</g>"
    )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
