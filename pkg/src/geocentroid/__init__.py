"""Weighted geographic centroids of research output, computed per time period."""

__version__ = "0.1.0"

from geocentroid.registry import OrgRecord, OrgRegistry, load_registry, lookup
from geocentroid.ingest import (
    AuthorEntry,
    PublicationRecord,
    RecordError,
    ResolvedPublication,
    parse_record,
    resolve_affiliations,
)
from geocentroid.weighting import (
    ContributionWeight,
    WeightScheme,
    contribution_weights,
    publication_weight,
)
from geocentroid.engine import (
    CentroidAccumulator,
    PubCentroid,
    accumulate,
    finalize,
    merge,
    publication_centroid,
)
from geocentroid.trajectory import (
    PeriodKey,
    PeriodStats,
    TrajectoryConfig,
    TrajectoryPoint,
    build_trajectory,
    period_counts,
    period_key,
)

__all__ = [
    "__version__",
    "AuthorEntry",
    "CentroidAccumulator",
    "ContributionWeight",
    "OrgRecord",
    "OrgRegistry",
    "PeriodKey",
    "PeriodStats",
    "PubCentroid",
    "PublicationRecord",
    "RecordError",
    "ResolvedPublication",
    "TrajectoryConfig",
    "TrajectoryPoint",
    "WeightScheme",
    "accumulate",
    "build_trajectory",
    "contribution_weights",
    "finalize",
    "load_registry",
    "lookup",
    "merge",
    "parse_record",
    "period_counts",
    "period_key",
    "publication_centroid",
    "publication_weight",
    "resolve_affiliations",
]
