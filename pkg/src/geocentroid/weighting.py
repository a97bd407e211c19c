"""Author-organization contribution weights and publication-level weights."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from geocentroid.ingest import ResolvedPublication
from geocentroid.registry import OrgRecord

UNWEIGHTED = "unweighted"
CITATIONS = "citations"
CITATIONS_WINDOW = "citations-window"
CUSTOM = "custom"


class ContributionWeight(NamedTuple):
    org: OrgRecord
    weight: float

    @property
    def org_id(self) -> str:
        return self.org.org_id


@dataclass(frozen=True)
class WeightScheme:
    """How much a whole publication counts towards its period's centroid.

    ``kind`` is one of ``unweighted``, ``citations``, ``citations-window``
    (with ``window`` years, counting the publication year) or ``custom``
    (reading ``field`` from the record's ``weights`` object).
    """

    kind: str = UNWEIGHTED
    window: int | None = None
    field: str | None = None

    def __post_init__(self):
        if self.kind == CITATIONS_WINDOW:
            if self.window is None or self.window < 1:
                raise ValueError("citation window must be a positive number of years")
        elif self.kind == CUSTOM:
            if not self.field:
                raise ValueError("custom weight scheme needs a field name")
        elif self.kind not in (UNWEIGHTED, CITATIONS):
            raise ValueError(f"unknown weight scheme {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "WeightScheme":
        """Parse ``unweighted``, ``citations``, ``citations-window:N`` or ``custom:NAME``."""
        kind, sep, arg = text.strip().partition(":")
        kind = kind.replace("_", "-")
        if kind == CITATIONS_WINDOW:
            try:
                window = int(arg)
            except ValueError:
                raise ValueError(f"bad citation window {arg!r}") from None
            return cls(CITATIONS_WINDOW, window=window)
        if kind in (CUSTOM, "custom-field"):
            return cls(CUSTOM, field=arg)
        if sep:
            raise ValueError(f"weight scheme {kind!r} takes no argument")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == CITATIONS_WINDOW:
            return f"{CITATIONS_WINDOW}:{self.window}"
        if self.kind == CUSTOM:
            return f"{CUSTOM}:{self.field}"
        return self.kind

    def is_available(self, pub: ResolvedPublication) -> bool:
        """False when the data this scheme reads is missing from ``pub``."""
        if self.kind == CITATIONS_WINDOW:
            return pub.citations_by_year is not None
        if self.kind == CUSTOM:
            return pub.custom_weights is not None and self.field in pub.custom_weights
        return True


def contribution_weights(pub: ResolvedPublication) -> list[ContributionWeight]:
    """Split one publication over its (author, organization) pairs.

    Each of the ``n`` resolved authors holds ``1/n`` of the publication, shared
    equally among that author's ``m`` organizations. Weight landing on the
    same organization from several authors is summed, so the result has one
    entry per distinct organization, in first-appearance order. Returns an
    empty list when no author resolved.
    """
    authors = pub.resolved_authors
    n = len(authors)
    if n == 0:
        return []
    shares: dict[str, list] = {}
    for orgs in authors:
        share = 1.0 / len(orgs)
        for org in orgs:
            slot = shares.get(org.org_id)
            if slot is None:
                shares[org.org_id] = [org, share]
            else:
                slot[1] += share
    # dividing the per-org share sum by n keeps a lone org at exactly 1.0
    return [ContributionWeight(org, s / n) for org, s in shares.values()]


def publication_weight(pub: ResolvedPublication, scheme: WeightScheme) -> float:
    kind = scheme.kind
    if kind == UNWEIGHTED:
        return 1.0
    if kind == CITATIONS:
        return float(pub.times_cited)
    if kind == CITATIONS_WINDOW:
        by_year = pub.citations_by_year
        if not by_year:
            return 0.0
        first, last = pub.year, pub.year + scheme.window - 1
        return float(sum(c for y, c in by_year.items() if first <= y <= last))
    weights = pub.custom_weights
    if not weights:
        return 0.0
    return float(weights.get(scheme.field, 0.0))
