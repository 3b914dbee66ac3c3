"""Deterministic chunked Monte Carlo accumulation.

Samples are drawn in fixed-size chunks, each chunk from its own generator
seeded by (master seed, stream tag, chunk index).  The reduction runs in
chunk order, so a given (seed, tag, n_samples, chunk size) always produces
bit-identical estimates no matter how many worker threads execute the
chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .model import Estimate

CHUNK_SIZE = 1 << 16


def chunk_rng(seed: int, tag: int, index: int) -> np.random.Generator:
    """Generator for one chunk, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, index)))


def mc_mean(sample_chunk: Callable[[np.random.Generator, int], np.ndarray],
            n_samples: int, seed: int, tag: int = 0,
            chunk_size: int = CHUNK_SIZE, workers: int = 1) -> Estimate:
    """Estimate the mean of ``sample_chunk(rng, m)`` over n_samples draws.

    sample_chunk must return a 1-D float array of length m of i.i.d. values.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    sizes = [chunk_size] * (n_samples // chunk_size)
    if n_samples % chunk_size:
        sizes.append(n_samples % chunk_size)

    def run(index: int):
        values = np.asarray(sample_chunk(chunk_rng(seed, tag, index), sizes[index]), dtype=float)
        return values.sum(), float(values @ values), values.size

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]

    total = sum(p[2] for p in parts)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / total
    if total > 1:
        var = max(s2 - total * mean * mean, 0.0) / (total - 1)
    else:
        var = 0.0
    return Estimate(mean, np.sqrt(var / total), total)
