"""Small shared utilities: deterministic parallel mapping over ladder jobs."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_count", "parallel_map"]

WORKERS_ENV = "SPHEREMASS_WORKERS"


def worker_count():
    """Worker count from the environment (the only env override), default 1."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving order; results are aggregated by index so the output
    is identical for any worker count."""
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
