"""Reproducible random streams and a small ordered parallel map.

Every random quantity is drawn from a Philox (counter-based) generator keyed
by ``(seed, *keys)``, so replication ``r`` sees the same numbers no matter
how replications are scheduled across workers.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValueError(f"seeds and stream keys must be non-negative: {entropy}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def thread_count() -> int:
    env = os.environ.get("QSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(func, items):
    """``[func(i) for i in items]``, run on up to ``QSPEC_THREADS`` threads."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
