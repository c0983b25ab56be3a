"""Seeded random streams and chunked shot execution.

Shots are grouped into fixed-size chunks and every chunk draws from its own
generator keyed by (seed, tag, chunk index). The chunk size depends only on
the experiment configuration, so results do not depend on how many workers
process the chunks or in what order they finish.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")

# Stream tags keep independent noise sources decoupled.
TAG_NOISE = 1
TAG_MEASURE = 2
TAG_SILENT = 3
TAG_ERRORS = 4


def stream(seed: int, tag: int, chunk: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(tag), int(chunk)))
    return np.random.Generator(np.random.PCG64(ss))


def chunks(shots: int, size: int) -> list[tuple[int, int]]:
    """(start, stop) shot ranges of at most ``size`` shots."""
    if shots < 0:
        raise ValueError("shots must be non-negative")
    size = max(1, int(size))
    return [(a, min(a + size, shots)) for a in range(0, shots, size)]


def run_chunks(fn: Callable[[int, int, int], T], shots: int, size: int, workers: int = 1) -> list[T]:
    """Call ``fn(chunk_index, start, stop)`` for every chunk; results in chunk order."""
    ranges = chunks(shots, size)
    if workers <= 1 or len(ranges) <= 1:
        return [fn(i, a, b) for i, (a, b) in enumerate(ranges)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, i, a, b) for i, (a, b) in enumerate(ranges)]
        return [f.result() for f in futures]
