"""Grouping of publications into periods and assembly of centroid trajectories."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from geocentroid.engine import (
    PLANAR,
    CentroidAccumulator,
    DegenerateCentroidError,
    check_mode,
    finalize,
    publication_centroid,
)
from geocentroid.ingest import (
    DEFAULT_YEAR_RANGE,
    PublicationRecord,
    RecordError,
    parse_record,
    resolve_affiliations,
)
from geocentroid.registry import OrgRegistry
from geocentroid.weighting import WeightScheme, contribution_weights, publication_weight

YEAR = "year"
MONTH = "month"
DEFAULT_MIN_RECORDS = 1000
MAX_KEPT_DIAGNOSTICS = 1000

_PERIOD_RE = re.compile(r"^\s*(-?\d{1,4})(?:-(\d{1,2}))?\s*$")


class PeriodKey(NamedTuple):
    year: int
    month: int | None = None

    def __str__(self) -> str:
        if self.month is None:
            return str(self.year)
        return f"{self.year}-{self.month:02d}"


def parse_period(text: str) -> PeriodKey:
    """Parse ``YYYY`` or ``YYYY-MM``."""
    m = _PERIOD_RE.match(text)
    if not m:
        raise ValueError(f"bad period {text!r} (expected YYYY or YYYY-MM)")
    year = int(m.group(1))
    if m.group(2) is None:
        return PeriodKey(year)
    month = int(m.group(2))
    if not 1 <= month <= 12:
        raise ValueError(f"bad period {text!r}: month out of range")
    return PeriodKey(year, month)


def period_key(record, granularity: str = YEAR) -> PeriodKey | None:
    """Bucket for ``record``; ``None`` means undated at this granularity."""
    if granularity == YEAR:
        return PeriodKey(record.year)
    if record.month is None:
        return None
    return PeriodKey(record.year, record.month)


@dataclass(frozen=True, slots=True)
class TrajectoryPoint:
    period: PeriodKey
    latitude: float
    longitude: float
    n_pubs: int
    total_weight: float
    robust: bool


@dataclass(frozen=True, slots=True)
class PeriodStats:
    period: PeriodKey
    n_records_total: int
    n_records_contributing: int
    n_records_skipped: int


@dataclass(frozen=True)
class TrajectoryConfig:
    scheme: WeightScheme = field(default_factory=WeightScheme)
    mode: str = PLANAR
    granularity: str = YEAR
    min_records: int = DEFAULT_MIN_RECORDS
    period_from: PeriodKey | None = None
    period_to: PeriodKey | None = None
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
    strict: bool = False

    def __post_init__(self):
        check_mode(self.mode)
        if self.granularity not in (YEAR, MONTH):
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.min_records < 0:
            raise ValueError("min_records must be non-negative")
        lo, hi = self.period_from, self.period_to
        if self.granularity == MONTH:
            if lo is not None and lo.month is None:
                lo = PeriodKey(lo.year, 1)
            if hi is not None and hi.month is None:
                hi = PeriodKey(hi.year, 12)
        else:
            # a month bound under yearly grouping applies to its whole year
            lo = PeriodKey(lo.year) if lo is not None else None
            hi = PeriodKey(hi.year) if hi is not None else None
        if lo is not None and hi is not None and hi < lo:
            raise ValueError(f"period filter is empty: from {lo} > to {hi}")
        object.__setattr__(self, "period_from", lo)
        object.__setattr__(self, "period_to", hi)

    def in_range(self, key: PeriodKey) -> bool:
        lo, hi = self.period_from, self.period_to
        return (lo is None or key >= lo) and (hi is None or key <= hi)

    def metadata(self) -> dict:
        return {
            "mode": self.mode,
            "scheme": str(self.scheme),
            "granularity": self.granularity,
            "min_records": self.min_records,
            "period_from": None if self.period_from is None else str(self.period_from),
            "period_to": None if self.period_to is None else str(self.period_to),
        }


class TrajectoryBuilder:
    """Single-pass, mergeable aggregation of a record stream into periods.

    With ``count_only=True`` no centroid is computed and a record counts as
    contributing as soon as one of its authors resolves against the registry.
    """

    def __init__(self, registry: OrgRegistry, config: TrajectoryConfig, count_only: bool = False):
        if registry is None:
            raise ValueError("registry is required")
        self.registry = registry
        self.config = config
        self.count_only = count_only
        self.accs: dict[PeriodKey, CentroidAccumulator] = {}
        self.counters: Counter = Counter()
        self.diagnostics: list[RecordError] = []

    def _acc(self, key: PeriodKey) -> CentroidAccumulator:
        acc = self.accs.get(key)
        if acc is None:
            acc = self.accs[key] = CentroidAccumulator(self.config.mode)
        return acc

    def diagnose(self, err: RecordError) -> None:
        self.counters["invalid"] += 1
        if len(self.diagnostics) < MAX_KEPT_DIAGNOSTICS:
            self.diagnostics.append(err)

    def feed_line(self, line_no: int | None, line: bytes | str) -> None:
        self.counters["read"] += 1
        try:
            record = parse_record(line, line_no, self.config.year_range)
        except RecordError as err:
            if self.config.strict:
                raise
            self.diagnose(err)
            return
        self.feed_record(record)

    def feed_lines(self, lines: Iterable[tuple[int, bytes]]) -> "TrajectoryBuilder":
        for line_no, line in lines:
            self.feed_line(line_no, line)
        return self

    def feed_record(self, record: PublicationRecord) -> None:
        cfg = self.config
        counters = self.counters
        key = period_key(record, cfg.granularity)
        if key is None:
            counters["undated"] += 1
            return
        if not cfg.in_range(key):
            counters["filtered"] += 1
            return
        acc = self._acc(key)
        pub = resolve_affiliations(record, self.registry)
        if pub.dropped_author_count:
            counters["dropped_authors"] += pub.dropped_author_count
        if pub.unknown_org_count:
            counters["unknown_org_refs"] += pub.unknown_org_count
        if not pub.resolved_authors:
            counters["no_authors" if not record.authors else "unresolved"] += 1
            acc.skip()
            return
        if self.count_only:
            acc.n_pubs += 1
            return
        scheme = cfg.scheme
        if not scheme.is_available(pub):
            counters["missing_weight"] += 1
        w = publication_weight(pub, scheme)
        if w == 0:
            counters["zero_weight"] += 1
            acc.skip()
            return
        try:
            c = publication_centroid(pub, contribution_weights(pub), cfg.mode, w)
        except DegenerateCentroidError:
            counters["degenerate"] += 1
            acc.skip()
            return
        acc.add(c)

    def merge_from(self, other: "TrajectoryBuilder") -> None:
        for key, acc in other.accs.items():
            mine = self.accs.get(key)
            if mine is None:
                self.accs[key] = acc.copy()
            else:
                mine.merge_from(acc)
        self.counters.update(other.counters)
        room = MAX_KEPT_DIAGNOSTICS - len(self.diagnostics)
        if room > 0:
            self.diagnostics.extend(other.diagnostics[:room])

    def state(self) -> tuple:
        """Picklable partial result for shipping between processes."""
        return self.accs, self.counters, self.diagnostics

    def merge_state(self, state: tuple) -> None:
        accs, counters, diagnostics = state
        other = TrajectoryBuilder.__new__(TrajectoryBuilder)
        other.accs, other.counters, other.diagnostics = accs, counters, diagnostics
        self.merge_from(other)

    def period_stats(self) -> list[PeriodStats]:
        return [
            PeriodStats(key, acc.n_pubs + acc.n_skipped, acc.n_pubs, acc.n_skipped)
            for key, acc in sorted(self.accs.items())
        ]

    def points(self) -> list[TrajectoryPoint]:
        out = []
        threshold = self.config.min_records
        for key, acc in sorted(self.accs.items()):
            res = finalize(acc)
            if res is None:
                continue
            lat, lon, sw, n = res
            out.append(TrajectoryPoint(key, lat, lon, n, sw, n >= threshold))
        return out


def build_trajectory(
    pubs: Iterable,
    registry: OrgRegistry,
    config: TrajectoryConfig | None = None,
) -> tuple[list[TrajectoryPoint], list[PeriodStats]]:
    """Sequential single-pass trajectory over records or raw lines.

    ``pubs`` may yield :class:`PublicationRecord` objects, raw lines, or
    ``(line_number, line)`` pairs.
    """
    builder = TrajectoryBuilder(registry, config or TrajectoryConfig())
    _feed_any(builder, pubs)
    return builder.points(), builder.period_stats()


def period_counts(
    pubs: Iterable,
    registry: OrgRegistry,
    granularity: str = YEAR,
    config: TrajectoryConfig | None = None,
) -> list[PeriodStats]:
    """Per-period totals of records with and without a resolvable affiliation."""
    if config is None:
        config = TrajectoryConfig(granularity=granularity)
    builder = TrajectoryBuilder(registry, config, count_only=True)
    _feed_any(builder, pubs)
    return builder.period_stats()


def _feed_any(builder: TrajectoryBuilder, pubs: Iterable) -> None:
    for i, item in enumerate(pubs, 1):
        if isinstance(item, PublicationRecord):
            builder.counters["read"] += 1
            builder.feed_record(item)
        elif isinstance(item, tuple):
            builder.feed_line(*item)
        else:
            builder.feed_line(i, item)
