"""Matplotlib report figures written next to the delimited outputs."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from geocentroid.trajectory import PeriodStats, TrajectoryPoint  # noqa: E402

ROBUST_COLOR = "#d62728"
NONROBUST_COLOR = "#8c8c8c"

# fixed metadata keeps repeated renders of the same data byte-stable
_SAVE_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None, "Creator": None},
    ".pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}


def _save(fig, path: str) -> None:
    ext = path[path.rfind("."):].lower() if "." in path else ".png"
    with plt.rc_context({"svg.hashsalt": "geocentroid"}):
        fig.savefig(path, dpi=150, bbox_inches="tight", metadata=_SAVE_METADATA.get(ext))
    plt.close(fig)


def plot_trajectory(points: Sequence[TrajectoryPoint], path: str, title: str | None = None) -> None:
    """Centroid path on equirectangular axes, markers colored by robustness."""
    fig, ax = plt.subplots(figsize=(10, 5))
    ax.set_xlim(-180, 180)
    ax.set_ylim(-90, 90)
    ax.set_aspect("equal")
    ax.set_xticks(range(-180, 181, 60))
    ax.set_yticks(range(-90, 91, 30))
    ax.grid(True, color="#dddddd", linewidth=0.5)
    ax.set_xlabel("longitude (deg)")
    ax.set_ylabel("latitude (deg)")
    if points:
        ax.plot([p.longitude for p in points], [p.latitude for p in points],
                color="#404040", linewidth=0.8, zorder=1)
        for robust, color, label in ((False, NONROBUST_COLOR, "less robust"),
                                     (True, ROBUST_COLOR, "more robust")):
            sel = [p for p in points if p.robust is robust]
            if sel:
                ax.scatter([p.longitude for p in sel], [p.latitude for p in sel],
                           s=12, color=color, label=label, zorder=2)
        ax.annotate(str(points[0].period), (points[0].longitude, points[0].latitude), fontsize=7)
        if len(points) > 1:
            ax.annotate(str(points[-1].period), (points[-1].longitude, points[-1].latitude), fontsize=7)
        ax.legend(loc="lower left", fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_period_counts(
    stats: Sequence[PeriodStats],
    path: str,
    min_records: int | None = None,
    title: str | None = None,
) -> None:
    """Log-scaled contributing-record counts per period.

    Periods below ``min_records`` are shaded grey.
    """
    fig, ax = plt.subplots(figsize=(10, 4))
    labels = [str(s.period) for s in stats]
    xs = list(range(len(stats)))
    counts = [s.n_records_contributing for s in stats]
    ax.plot(xs, [c if c > 0 else float("nan") for c in counts], color="#1f77b4", marker=".")
    ax.set_yscale("log")
    if min_records is not None:
        for x, c in zip(xs, counts):
            if c < min_records:
                ax.axvspan(x - 0.5, x + 0.5, color="#e5e5e5", zorder=0, linewidth=0)
        ax.axhline(min_records, color=NONROBUST_COLOR, linestyle="--", linewidth=0.8)
    step = max(1, len(xs) // 12)
    ax.set_xticks(xs[::step])
    ax.set_xticklabels(labels[::step], rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("contributing records")
    if title:
        ax.set_title(title)
    _save(fig, path)
