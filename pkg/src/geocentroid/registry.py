"""Organization location registry (GRID/ROR-style CSV dumps)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterator

REQUIRED_COLUMNS = ("org_id", "name", "latitude", "longitude")


class RegistryError(Exception):
    """Raised when a registry cannot be loaded at all (or a row fails in strict mode)."""


@dataclass(frozen=True, slots=True)
class OrgRecord:
    org_id: str
    name: str
    latitude: float
    longitude: float


@dataclass(frozen=True, slots=True)
class RowError:
    line: int
    reason: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.reason}"


@dataclass
class OrgRegistry:
    """Immutable-after-load mapping from org id to its principal location."""

    entries: dict[str, OrgRecord] = field(default_factory=dict)
    source_path: str = "<memory>"
    errors: list[RowError] = field(default_factory=list)
    rows_total: int = 0

    def get(self, org_id: str) -> OrgRecord | None:
        return self.entries.get(org_id)

    def __contains__(self, org_id: object) -> bool:
        return org_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[OrgRecord]:
        return iter(self.entries.values())

    @property
    def rows_rejected(self) -> int:
        return self.rows_total - len(self.entries)

    @classmethod
    def from_records(cls, records, source_path: str = "<memory>") -> "OrgRegistry":
        entries = {}
        for rec in records:
            if rec.org_id in entries:
                raise RegistryError(f"duplicate org_id {rec.org_id!r}")
            entries[rec.org_id] = rec
        return cls(entries=entries, source_path=source_path, rows_total=len(entries))


def _parse_coordinate(raw: str | None, name: str, bound: float) -> float:
    if raw is None or raw.strip() == "":
        raise ValueError(f"missing {name}")
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{name} is not finite")
    if not -bound <= value <= bound:
        raise ValueError(f"{name} out of range")
    return value


def load_registry(
    source: IO[bytes] | IO[str] | bytes | str,
    format: str = "csv",
    *,
    strict: bool = False,
    source_path: str | None = None,
) -> OrgRegistry:
    """Load a registry CSV with header ``org_id,name,latitude,longitude``.

    ``source`` may be a binary or text stream, raw bytes, or a filesystem path.
    Bad rows are collected in ``registry.errors`` with their line numbers; with
    ``strict=True`` the first bad row raises :class:`RegistryError`. Columns
    beyond the four required ones are ignored.
    """
    if format != "csv":
        raise RegistryError(f"unsupported registry format {format!r}")

    if isinstance(source, str):
        with open(source, "rb") as fh:
            return load_registry(fh, format, strict=strict, source_path=source)
    if isinstance(source, bytes):
        text = io.StringIO(source.decode("utf-8-sig"), newline="")
    elif isinstance(source, io.TextIOBase):
        text = source
    else:
        text = io.TextIOWrapper(source, encoding="utf-8-sig", newline="")

    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise RegistryError("registry is empty: header row required") from None
    header = [h.strip() for h in header]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise RegistryError(f"registry header missing column(s): {', '.join(missing)}")
    idx = {c: header.index(c) for c in REQUIRED_COLUMNS}

    registry = OrgRegistry(source_path=source_path or getattr(source, "name", "<stream>"))
    first_seen: dict[str, int] = {}
    entries = registry.entries
    for row in reader:
        line = reader.line_num
        if not row:
            continue  # blank lines are not data rows
        registry.rows_total += 1
        try:
            if len(row) < len(header):
                raise ValueError(f"expected {len(header)} fields, got {len(row)}")
            org_id = row[idx["org_id"]].strip()
            if not org_id:
                raise ValueError("empty org_id")
            lat = _parse_coordinate(row[idx["latitude"]], "latitude", 90.0)
            lon = _parse_coordinate(row[idx["longitude"]], "longitude", 180.0)
            if org_id in first_seen:
                raise ValueError(
                    f"duplicate org_id {org_id!r} on lines {first_seen[org_id]} and {line}"
                )
        except ValueError as exc:
            err = RowError(line, str(exc))
            if strict:
                raise RegistryError(str(err)) from None
            registry.errors.append(err)
            continue
        first_seen[org_id] = line
        entries[org_id] = OrgRecord(org_id, row[idx["name"]], lat, lon)
    return registry


def lookup(registry: OrgRegistry, org_id: str) -> OrgRecord | None:
    """Exact, case-sensitive lookup; ``None`` when the id is not registered."""
    return registry.entries.get(org_id)
