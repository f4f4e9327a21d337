"""Seed-deterministic random substreams.

Every simulation splits its rounds into fixed-size chunks.  Chunk ``c`` of a
stream named ``tag`` draws from ``SeedSequence([seed, tag_id, c])``, so the
output depends only on the seed and never on how chunks are scheduled.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

CHUNK = 8192

T = TypeVar("T")


def _tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode())


def substream(seed: int, tag: str, *keys: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seeds must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), _tag_id(tag), *map(int, keys)])))


def chunk_bounds(n: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def map_chunks(
    fn: Callable[[np.random.Generator, int, int], T],
    n: int,
    seed: int,
    tag: str,
    workers: int | None = None,
    chunk: int = CHUNK,
) -> list[T]:
    """Run ``fn(rng, start, stop)`` per chunk; results come back in chunk order."""
    jobs = [(substream(seed, tag, i), s, e) for i, (s, e) in enumerate(chunk_bounds(n, chunk))]
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda j: fn(*j), jobs))
    return [fn(*j) for j in jobs]


def concat_fields(parts: Sequence[dict[str, np.ndarray]]) -> dict[str, np.ndarray]:
    if not parts:
        return {}
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
