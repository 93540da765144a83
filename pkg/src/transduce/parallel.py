"""Order-preserving thread map used by sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(workers: int | None = None) -> int:
    """Explicit ``workers``, else ``TRANSDUCE_THREADS``, else 1."""
    if workers is None:
        env = os.environ.get("TRANSDUCE_THREADS", "").strip()
        workers = int(env) if env else 1
    return max(1, int(workers))


def ordered_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly on a thread pool; result order matches input order."""
    items = list(items)
    n = thread_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
