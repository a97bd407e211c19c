"""Streaming file driver with optional multi-process sharding.

The input is read once, in chunks of lines. Each chunk is folded into a
private :class:`TrajectoryBuilder` (in-process or in a worker) and the
partial results are merged in chunk order, so memory stays bounded by the
number of periods rather than the number of records.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from itertools import islice

from geocentroid.ingest import iter_lines, open_records
from geocentroid.registry import OrgRegistry
from geocentroid.trajectory import TrajectoryBuilder, TrajectoryConfig

DEFAULT_CHUNK_LINES = 20_000

_worker_registry: OrgRegistry | None = None
_worker_config: TrajectoryConfig | None = None
_worker_count_only = False


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # not available on every platform
        return os.cpu_count() or 1


def _init_worker(registry, config, count_only):
    global _worker_registry, _worker_config, _worker_count_only
    _worker_registry, _worker_config, _worker_count_only = registry, config, count_only


def _run_chunk(lines):
    builder = TrajectoryBuilder(_worker_registry, _worker_config, _worker_count_only)
    builder.feed_lines(lines)
    return builder.state()


def _chunks(stream, size):
    it = iter_lines(stream)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def aggregate_file(
    path: str,
    registry: OrgRegistry,
    config: TrajectoryConfig,
    *,
    workers: int = 1,
    count_only: bool = False,
    chunk_lines: int = DEFAULT_CHUNK_LINES,
) -> TrajectoryBuilder:
    """Fold the publication file at ``path`` into one merged builder.

    ``workers=1`` runs sequentially in this process, which is the
    bit-reproducible path. Strict-mode record errors propagate as
    :class:`~geocentroid.ingest.RecordError`.
    """
    result = TrajectoryBuilder(registry, config, count_only)
    with open_records(path) as stream:
        if workers <= 1:
            return result.feed_lines(iter_lines(stream))

        chunks = _chunks(stream, chunk_lines)
        first = next(chunks, None)
        if first is None:
            return result
        second = next(chunks, None)
        if second is None:
            # one chunk: not worth a process pool
            return result.feed_lines(first)

        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(registry, config, count_only),
        ) as pool:
            pending = deque()
            pending.append(pool.submit(_run_chunk, first))
            pending.append(pool.submit(_run_chunk, second))
            for chunk in chunks:
                while len(pending) >= 2 * workers:
                    result.merge_state(pending.popleft().result())
                pending.append(pool.submit(_run_chunk, chunk))
            while pending:
                result.merge_state(pending.popleft().result())
    return result
