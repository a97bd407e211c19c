"""Naive in-memory reference computation, written independently of the package.

Everything is loaded up front and the centroids are computed directly as
weighted means: per author the distinct registered organizations, each
coordinate divided by that author's organization count and by the number
of registered authors; then per period sum(centroid * weight) / sum(weight),
dropping periods whose total weight is zero.
"""

import csv
import json
import math


def load_registry(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return {
            row["org_id"]: (float(row["latitude"]), float(row["longitude"]))
            for row in csv.DictReader(fh)
        }


def load_pubs(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def pub_weight(p, scheme):
    if scheme == "unweighted":
        return 1
    if scheme == "citations":
        return p.get("times_cited") or 0
    if scheme.startswith("citations-window:"):
        n = int(scheme.split(":")[1])
        by_year = {int(k): v for k, v in (p.get("citations_by_year") or {}).items()}
        return sum(by_year.get(y, 0) for y in range(p["year"], p["year"] + n))
    if scheme.startswith("custom:"):
        return (p.get("weights") or {}).get(scheme.split(":", 1)[1], 0)
    raise ValueError(scheme)


def pub_center(p, registry):
    authors = []
    for a in p.get("authors") or []:
        orgs = sorted({o for o in a.get("org_ids") or [] if o in registry})
        if orgs:
            authors.append(orgs)
    if not authors:
        return None
    lat = lon = 0.0
    for orgs in authors:
        for o in orgs:
            lat += registry[o][0] / len(orgs) / len(authors)
            lon += registry[o][1] / len(orgs) / len(authors)
    return lat, lon


def trajectory(pubs, registry, scheme="unweighted", granularity="year"):
    """{period_label: (lat, lon, n_contributing, total_weight)}"""
    groups = {}
    for p in pubs:
        if granularity == "month":
            if p.get("month") is None:
                continue
            key = f"{p['year']}-{p['month']:02d}"
        else:
            key = str(p["year"])
        c = pub_center(p, registry)
        if c is None:
            continue
        w = pub_weight(p, scheme)
        if w > 0:
            groups.setdefault(key, []).append((c, w))
    out = {}
    for key, items in groups.items():
        total = sum(w for _, w in items)
        lat = sum(c[0] * w for c, w in items) / total
        lon = sum(c[1] * w for c, w in items) / total
        out[key] = (lat, lon, len(items), total)
    return out


def unit_vector_mean(points, weights):
    """Spherical mean of (lat, lon) degrees via 3D unit vectors -> (lat, lon)."""
    x = y = z = 0.0
    for (lat, lon), w in zip(points, weights):
        phi, lam = lat * math.pi / 180, lon * math.pi / 180
        x += w * math.cos(phi) * math.cos(lam)
        y += w * math.cos(phi) * math.sin(lam)
        z += w * math.sin(phi)
    r = math.sqrt(x * x + y * y)
    return math.atan2(z, r) * 180 / math.pi, math.atan2(y, x) * 180 / math.pi
