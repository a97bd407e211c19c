"""Parsing, validation and affiliation resolution of publication records.

Input is one JSON object per line, optionally gzip-compressed::

    {"id": "p1", "year": 2020, "month": 3, "times_cited": 4,
     "citations_by_year": {"2020": 1, "2021": 3}, "weights": {"funding": 1.5e5},
     "authors": [{"name": "A. Author", "org_ids": ["grid.1", "grid.2"]}]}
"""

from __future__ import annotations

import gzip
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterator

from geocentroid.registry import OrgRecord, OrgRegistry

GZIP_MAGIC = b"\x1f\x8b"
DEFAULT_YEAR_RANGE = (1400, 2100)


class RecordError(ValueError):
    """A publication line failed to parse or validate."""

    def __init__(self, reason: str, line: int | None = None):
        super().__init__(reason)
        self.reason = reason
        self.line = line

    def __str__(self) -> str:
        if self.line is None:
            return self.reason
        return f"line {self.line}: {self.reason}"


@dataclass(slots=True)
class AuthorEntry:
    org_ids: tuple[str, ...] = ()
    display_name: str | None = None


@dataclass(slots=True)
class PublicationRecord:
    pub_id: str
    year: int
    authors: tuple[AuthorEntry, ...] = ()
    month: int | None = None
    times_cited: int = 0
    citations_by_year: dict[int, int] | None = None
    custom_weights: dict[str, float] | None = None


@dataclass(slots=True)
class ResolvedPublication:
    pub_id: str
    year: int
    month: int | None
    resolved_authors: tuple[tuple[OrgRecord, ...], ...]
    times_cited: int = 0
    citations_by_year: dict[int, int] | None = None
    custom_weights: dict[str, float] | None = None
    dropped_author_count: int = 0
    unknown_org_count: int = 0


def record_from_dict(obj, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE) -> PublicationRecord:
    """Validate a decoded JSON object and build a :class:`PublicationRecord`."""
    if not isinstance(obj, dict):
        raise RecordError("record is not an object")

    pub_id = obj.get("id")
    if not isinstance(pub_id, str) or not pub_id:
        raise RecordError("missing or empty id")

    year = obj.get("year")
    if type(year) is not int:
        raise RecordError("missing or non-integer year")
    if not year_range[0] <= year <= year_range[1]:
        raise RecordError("year out of range")

    month = obj.get("month")
    if month is not None:
        if type(month) is not int:
            raise RecordError("non-integer month")
        if not 1 <= month <= 12:
            raise RecordError("month out of range")

    times_cited = obj.get("times_cited")
    if times_cited is None:
        times_cited = 0
    elif type(times_cited) is not int:
        raise RecordError("times_cited must be an integer")
    elif times_cited < 0:
        raise RecordError("negative citation count")

    by_year = obj.get("citations_by_year")
    if by_year is not None:
        if not isinstance(by_year, dict):
            raise RecordError("citations_by_year is not an object")
        parsed = {}
        for k, v in by_year.items():
            try:
                y = int(k)
            except ValueError:
                raise RecordError(f"citations_by_year key {k!r} is not a year") from None
            if type(v) is not int:
                raise RecordError("citations_by_year values must be integers")
            if v < 0:
                raise RecordError("negative citation count")
            parsed[y] = v
        by_year = parsed

    weights = obj.get("weights")
    if weights is not None:
        if not isinstance(weights, dict):
            raise RecordError("weights is not an object")
        for k, v in weights.items():
            if type(v) not in (int, float) or not math.isfinite(v):
                raise RecordError(f"weight {k!r} is not a finite number")
            if v < 0:
                raise RecordError(f"negative weight {k!r}")

    raw_authors = obj.get("authors")
    if raw_authors is None:
        raw_authors = ()
    elif not isinstance(raw_authors, list):
        raise RecordError("authors is not a list")
    authors = []
    for a in raw_authors:
        if type(a) is not dict:
            raise RecordError("author entry is not an object")
        org_ids = a.get("org_ids")
        if org_ids is None:
            org_ids = ()
        else:
            if type(org_ids) is not list:
                raise RecordError("org_ids must be a list of strings")
            for o in org_ids:
                if type(o) is not str:
                    raise RecordError("org_ids must be a list of strings")
            org_ids = tuple(org_ids)
        name = a.get("name")
        if name is not None and type(name) is not str:
            raise RecordError("author name must be a string")
        authors.append(AuthorEntry(org_ids, name))

    return PublicationRecord(
        pub_id, year, tuple(authors), month, times_cited, by_year, weights
    )


def parse_record(
    line: bytes | str,
    line_no: int | None = None,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> PublicationRecord:
    """Parse one line of the publication file; raises :class:`RecordError`."""
    try:
        obj = json.loads(line)
    except ValueError as exc:  # JSONDecodeError and UnicodeDecodeError
        raise RecordError(f"syntax error: {exc}", line_no) from None
    try:
        return record_from_dict(obj, year_range)
    except RecordError as exc:
        exc.line = line_no
        raise


def resolve_affiliations(record: PublicationRecord, registry: OrgRegistry) -> ResolvedPublication:
    """Look up every author's org ids, dropping unknown ids and empty authors.

    Ids are deduplicated per author (first occurrence order kept) so that an
    author split over ``m`` organizations counts each distinct one once.
    """
    if registry is None:
        raise ValueError("registry is required to resolve affiliations")
    entries = registry.entries
    resolved = []
    dropped = 0
    unknown = 0
    for author in record.authors:
        orgs = []
        ids = author.org_ids
        if len(ids) > 1:
            ids = dict.fromkeys(ids)  # ordered dedup
        for oid in ids:
            org = entries.get(oid)
            if org is None:
                unknown += 1
            else:
                orgs.append(org)
        if orgs:
            resolved.append(tuple(orgs))
        else:
            dropped += 1
    return ResolvedPublication(
        record.pub_id,
        record.year,
        record.month,
        tuple(resolved),
        record.times_cited,
        record.citations_by_year,
        record.custom_weights,
        dropped,
        unknown,
    )


def open_records(path: str) -> IO[bytes]:
    """Open a publication file for binary reading, transparently gunzipping."""
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == GZIP_MAGIC:
        return gzip.open(path, "rb")
    return open(path, "rb")


def iter_lines(stream: IO[bytes]) -> Iterator[tuple[int, bytes]]:
    """Yield ``(line_number, line)`` for non-blank lines, numbering from 1."""
    for i, line in enumerate(stream, 1):
        if line.strip():
            yield i, line


@dataclass
class ValidationReport:
    lines: int = 0
    valid: int = 0
    errors: list[RecordError] = field(default_factory=list)
    n_errors: int = 0
    max_kept: int = 1000

    def add_error(self, err: RecordError) -> None:
        self.n_errors += 1
        if len(self.errors) < self.max_kept:
            self.errors.append(err)


def validate_stream(
    stream: IO[bytes],
    *,
    strict: bool = False,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> ValidationReport:
    """Parse-only pass over a publication stream."""
    report = ValidationReport()
    for line_no, line in iter_lines(stream):
        report.lines += 1
        try:
            parse_record(line, line_no, year_range)
        except RecordError as err:
            if strict:
                raise
            report.add_error(err)
        else:
            report.valid += 1
    return report
