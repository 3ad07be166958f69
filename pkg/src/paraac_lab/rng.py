"""Reproducible random streams.

Every stream is numpy's PCG64 seeded through ``SeedSequence(entropy=master_seed,
spawn_key=key)``.  SeedSequence is numpy's documented integer hash for mixing
stream indices into a seed, so streams with equal keys agree bit for bit on
every platform and distinct keys give independent streams.

Only ``Generator.random`` (53-bit mantissa doubles) is consumed; Bernoulli
draws are ``u < p`` and subsets come from a partial Fisher-Yates shuffle driven
by those uniforms.  Nothing depends on numpy's version-dependent samplers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_index: int = 0
    scope: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(*self.scope, self.stream_index))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> RngStream:
        """Stream for sub-task ``index`` nested below this one."""
        return RngStream(self.master_seed, index, (*self.scope, self.stream_index))


def bernoulli(gen: np.random.Generator, p: float, size: int) -> np.ndarray:
    return gen.random(size) < p


def random_subset(gen: np.random.Generator, n: int, k: int) -> list[int]:
    """Uniform k-subset of [n] (1-based, sorted)."""
    if not 0 <= k <= n:
        raise ValueError(f"cannot choose {k} of {n}")
    if k == 0:
        return []
    u = gen.random(k)
    pool = list(range(1, n + 1))
    for i in range(k):
        j = i + min(int(u[i] * (n - i)), n - i - 1)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])
