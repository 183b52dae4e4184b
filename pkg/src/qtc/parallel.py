"""Deterministic work distribution.

Every work unit draws from its own stream derived from ``(master_seed,
stream tag, unit index)``, so results never depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

WORKERS_ENV = "QTC_WORKERS"

# stream tags keep the interleaver, frames and curves on disjoint streams
STREAM_FRAMES = 1
STREAM_INTERLEAVER = 2
STREAM_EXIT = 3
STREAM_SEARCH = 4


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def unit_rng(master_seed: int, tag: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), int(tag), int(index)])


@contextmanager
def worker_map(workers: int | None = None):
    """Yield a ``map``-like callable backed by a process pool when ``workers > 1``."""
    workers = default_workers() if workers is None else workers
    if workers <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield lambda fn, *its: pool.map(fn, *its, chunksize=1)
