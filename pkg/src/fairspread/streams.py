"""Deterministic random substreams and chunked parallel execution.

Every stochastic routine draws from substreams keyed by a tag and integer
indices below one master seed. Work is cut into fixed-size chunks and each
chunk owns its own substream, so results do not depend on how many worker
threads execute the chunks.
"""

from __future__ import annotations

import os
import zlib
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar, Union

import numpy as np

from .errors import UsageError

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

THREADS_ENV = "FAIRSPREAD_THREADS"
CHUNK_SIZE = 1024

T = TypeVar("T")


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """Normalize a seed argument.

    A ``Generator`` is consumed once to derive a fresh root; ``None`` means
    fresh OS entropy.
    """
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63 - 1)))
    return np.random.SeedSequence(seed)


def _key_part(part: int | str) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError("substream indices must be non-negative")
    return int(part)


def substream(root: SeedLike, *key: int | str) -> np.random.SeedSequence:
    root = as_seed_sequence(root)
    return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + tuple(_key_part(k) for k in key))


def generator(root: SeedLike, *key: int | str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(substream(root, *key)))


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return max(1, int(threads))


def chunk_bounds(total: int, chunk: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def map_chunks(fn: Callable[[int], T], n_chunks: int, threads: int | None = None) -> list[T]:
    """Evaluate ``fn(i)`` for every chunk index; results come back in index order."""
    workers = min(resolve_threads(threads), n_chunks)
    if workers <= 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_chunks)))
