"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, index)`` through a
``SeedSequence`` spawn key, so a block of paths draws the same numbers no
matter which worker (or how many workers) produces it.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, TypeVar

import numpy as np

BLOCK_SIZE = 1 << 15
THREADS_ENV = "ORTHOMOTION_THREADS"

T = TypeVar("T")


def stream(seed: int, index: int = 0, *, salt: int = 0) -> np.random.Generator:
    """Independent generator for the pair (seed, index).

    ``salt`` separates unrelated uses of the same seed (e.g. two samplers in
    one experiment).
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(salt), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def blocks(n: int, block_size: int = BLOCK_SIZE) -> Iterator[tuple[int, int, int]]:
    """Yield ``(block_index, start, count)`` covering range(n)."""
    for b, start in enumerate(range(0, n, block_size)):
        yield b, start, min(block_size, n - start)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_blocks(
    fn: Callable[[np.random.Generator, int, int], T],
    n: int,
    seed: int,
    *,
    salt: int = 0,
    block_size: int = BLOCK_SIZE,
    threads: int | None = None,
) -> list[T]:
    """Run ``fn(rng, start, count)`` per block and return results in block order."""
    threads = default_threads() if threads is None else threads
    jobs = list(blocks(n, block_size))

    def run(job):
        b, start, count = job
        return fn(stream(seed, b, salt=salt), start, count)

    if threads <= 1 or len(jobs) <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))
