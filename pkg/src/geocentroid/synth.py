"""Seeded synthetic registries and publication files.

Output is a pure function of :class:`SynthConfig`: the same configuration
always produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from typing import IO, Sequence

from geocentroid.trajectory import PeriodKey, parse_period

# Monthly COVID-19 publication counts for 2020, January to December.
COVID_2020_MONTHLY = (289, 751, 3140, 9999, 15502, 15377, 16706, 15645, 16191, 18304, 15170, 15153)

PRESETS = {
    "covid-2020-monthly": [
        (PeriodKey(2020, m), n) for m, n in enumerate(COVID_2020_MONTHLY, 1)
    ],
}


@dataclass
class SynthConfig:
    seed: int = 0
    plan: list[tuple[PeriodKey, int]] = field(default_factory=list)
    org_pool: int = 500
    authors: tuple[int, int] = (1, 8)
    orgs_per_author: tuple[int, int] = (1, 3)
    citations: tuple[int, int] = (0, 200)
    unknown_org_rate: float = 0.05
    citation_years: int = 5
    custom_weight: str | None = "funding"
    locations: Sequence[tuple[float, float]] | None = None

    def __post_init__(self):
        for name in ("authors", "orgs_per_author", "citations"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ValueError(f"bad {name} bounds ({lo}, {hi})")
        if self.authors[0] < 1 or self.orgs_per_author[0] < 1:
            raise ValueError("authors and orgs_per_author need a lower bound of at least 1")
        if self.org_pool < 1:
            raise ValueError("org_pool must be positive")
        if not 0.0 <= self.unknown_org_rate <= 1.0:
            raise ValueError("unknown_org_rate must be within [0, 1]")
        for key, n in self.plan:
            if n < 0:
                raise ValueError(f"negative record count for {key}")


def parse_plan(text: str) -> list[tuple[PeriodKey, int]]:
    """Parse ``2020-01:289,2020-02:751`` (or yearly ``1990:1000``)."""
    plan = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        period, sep, count = part.rpartition(":")
        if not sep:
            raise ValueError(f"bad plan entry {part!r} (expected PERIOD:COUNT)")
        plan.append((parse_period(period), int(count)))
    return plan


def _org_id(i: int) -> str:
    return f"grid.synth.{i}"


def write_registry(config: SynthConfig, out: IO[str]) -> None:
    rng = random.Random(f"registry:{config.seed}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["org_id", "name", "latitude", "longitude"])
    locs = config.locations
    for i in range(config.org_pool):
        if locs:
            lat, lon = locs[i % len(locs)]
        else:
            lat = round(rng.uniform(-90.0, 90.0), 4)
            lon = round(rng.uniform(-180.0, 180.0), 4)
        writer.writerow([_org_id(i), f"Synthetic Organization {i}", f"{lat:.4f}", f"{lon:.4f}"])


def write_publications(config: SynthConfig, out: IO[str]) -> int:
    """Write the planned records; returns how many were written."""
    rng = random.Random(f"pubs:{config.seed}")
    rand, randint = rng.random, rng.randint
    a_lo, a_hi = config.authors
    o_lo, o_hi = config.orgs_per_author
    c_lo, c_hi = config.citations
    pool = config.org_pool
    unknown = config.unknown_org_rate
    dumps = json.JSONEncoder(separators=(",", ":")).encode
    n = 0
    for key, count in config.plan:
        for _ in range(count):
            authors = []
            for _a in range(randint(a_lo, a_hi)):
                ids = []
                for _o in range(randint(o_lo, o_hi)):
                    if rand() < unknown:
                        ids.append(f"grid.unknown.{int(rand() * pool)}")
                    else:
                        ids.append(_org_id(int(rand() * pool)))
                authors.append({"org_ids": ids})
            rec = {"id": f"synth.{n:08d}", "year": key.year}
            if key.month is not None:
                rec["month"] = key.month
            cited = randint(c_lo, c_hi)
            rec["times_cited"] = cited
            if config.citation_years > 0:
                by_year = {}
                left = cited
                for k in range(config.citation_years):
                    if left <= 0:
                        break
                    c = left if k == config.citation_years - 1 else int(rand() * (left + 1))
                    if c:
                        by_year[str(key.year + k)] = c
                    left -= c
                rec["citations_by_year"] = by_year
            if config.custom_weight:
                rec["weights"] = {config.custom_weight: round(rand() * 1000.0, 3)}
            rec["authors"] = authors
            out.write(dumps(rec))
            out.write("\n")
            n += 1
    return n


def generate_synthetic(config: SynthConfig, registry_path: str, pubs_path: str) -> int:
    """Write a registry CSV and a publication file; returns the record count."""
    with open(registry_path, "w", encoding="utf-8", newline="") as fh:
        write_registry(config, fh)
    with open(pubs_path, "w", encoding="utf-8", newline="") as fh:
        return write_publications(config, fh)
