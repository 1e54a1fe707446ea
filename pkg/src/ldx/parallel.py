"""Ordered parallel map capped by the LDX_THREADS environment variable."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    raw = os.environ.get("LDX_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def pmap(fn, items):
    """``list(map(fn, items))``, possibly on a thread pool; order is preserved."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
