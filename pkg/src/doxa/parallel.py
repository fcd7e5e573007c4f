"""Thread fan-out capped by ``DOXA_THREADS``; results keep input order."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(n_items: int) -> int:
    try:
        cap = int(os.environ.get("DOXA_THREADS", "0"))
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = min(8, os.cpu_count() or 1)
    return max(1, min(cap, n_items))


def pmap(fn, items):
    items = list(items)
    workers = thread_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
