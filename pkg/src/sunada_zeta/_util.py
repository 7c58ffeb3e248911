"""Small shared helpers: thread pool sizing and deterministic formatting."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "SUNADA_ZETA_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving input order; threads only when the env cap allows."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def fmt_float(x) -> str:
    """17 significant digits; round-trips float64 exactly."""
    return f"{float(x):.17g}"
