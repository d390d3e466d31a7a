"""Per-source fan-out helper.

Sources are independent, so results are collected by key and identical at
any parallelism degree; OWNET_THREADS caps the pool (0 or unset = one
worker per CPU, 1 = sequential).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from ._accel import worker_threads

T = TypeVar("T")


def map_sources(fn: Callable[[str], T], sources: Iterable[str]) -> dict[str, T]:
    items = list(sources)
    workers = min(worker_threads(), max(len(items), 1))
    if workers <= 1:
        return {s: fn(s) for s in items}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(fn, items)
        return dict(zip(items, results))
