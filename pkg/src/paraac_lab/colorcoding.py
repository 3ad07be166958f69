"""Colour-coding hash family h_{p,q}(m) = (q m mod p) mod k^2 and its uses."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator


@dataclass(frozen=True)
class HashParams:
    p: int
    q: int
    k: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not 0 <= self.q < self.p:
            raise ValueError("need 0 <= q < p")
        if self.k < 1:
            raise ValueError("k must be positive")

    @property
    def range_size(self) -> int:
        return self.k * self.k


def hash_value(params: HashParams, m: int) -> int:
    return (params.q * m % params.p) % (params.k * params.k)


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    return all(x % d for d in range(2, math.isqrt(x) + 1))


def primes_below(bound: float) -> list[int]:
    """All primes p with p < bound (bound may be real)."""
    top = math.ceil(bound)
    if top <= 2:
        return []
    sieve = bytearray([1]) * top
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(top - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, top, i)))
    return [i for i in range(top) if sieve[i] and i < bound]


def prime_bound(k: int, n: int) -> float:
    """k^2 log2 n; the hash search uses primes strictly below it."""
    return k * k * math.log2(n) if n >= 1 else 0.0


def candidate_params(k: int, n: int, floor: float = 0.0) -> Iterator[HashParams]:
    """(p, q) in lexicographic order; q = 0 is skipped since h_{p,0} is constant."""
    for p in primes_below(max(prime_bound(k, n), floor)):
        for q in range(1, p):
            yield HashParams(p, q, k)


def is_injective(params: HashParams, xs: Iterable[int]) -> bool:
    seen = set()
    for x in xs:
        h = hash_value(params, x)
        if h in seen:
            return False
        seen.add(h)
    return True


def find_injective_hash(x: Iterable[int], k: int, n: int) -> HashParams | None:
    """Smallest (p, q) whose hash is injective on x, or None if none exists."""
    xs = sorted(set(x))
    if len(xs) != k:
        raise ValueError(f"set has {len(xs)} elements, expected k={k}")
    if any(not 1 <= v <= n for v in xs):
        raise ValueError(f"set is not inside [{n}]")
    for params in candidate_params(k, n):
        if is_injective(params, xs):
            return params
    return None


def color_functions(k: int) -> Iterator[tuple[int, ...]]:
    """All k^(k^2) maps {0..k^2-1} -> {0..k-1}, in lexicographic order."""
    return itertools.product(range(k), repeat=k * k)


def _witness_colouring(realized: list[int], k: int) -> tuple[int, ...]:
    # any map onto {0..k-1} from the realised hash values will do
    g = [0] * (k * k)
    for colour, h in enumerate(realized[:k]):
        g[h] = colour
    return tuple(g)


def colour_classes_covered(params: HashParams, g: tuple[int, ...], witnesses: list[int]) -> bool:
    """Every colour j < k has a witness u with g(h(u)) = j."""
    colours = {g[hash_value(params, u)] for u in witnesses}
    return all(j in colours for j in range(params.k))


def distinct_witness_search(universe_size: int, holds: Callable[[int], bool], k: int,
                            exhaustive_g: bool = False):
    """Find (params, g) certifying k distinct elements satisfying ``holds``.

    Only colours realised by h on satisfying elements matter, so by default g
    is built directly as a map onto those classes; ``exhaustive_g`` walks all
    k^(k^2) maps instead (feasible for k <= 2).
    """
    witnesses = [u for u in range(1, universe_size + 1) if holds(u)]
    if len(witnesses) < k:
        # h cannot realise more classes than there are witnesses
        return None
    # k = 1 with n <= 4 leaves no prime below k^2 log2 n; p = 2 is then admitted
    for params in candidate_params(k, universe_size, floor=3):
        realized = sorted({hash_value(params, u) for u in witnesses})
        if len(realized) < k:
            continue
        if exhaustive_g:
            for g in color_functions(k):
                if colour_classes_covered(params, g, witnesses):
                    return params, g
        else:
            g = _witness_colouring(realized, k)
            if colour_classes_covered(params, g, witnesses):
                return params, g
    return None


def distinct_witness_decide(universe_size: int, holds: Callable[[int], bool], k: int) -> bool:
    """Are there k pairwise distinct u in [universe_size] with holds(u)?

    Decided through the hash family; k = 0 is always true.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return True
    return distinct_witness_search(universe_size, holds, k) is not None


def count_oracle(universe_size: int, holds: Callable[[int], bool], k: int) -> bool:
    return sum(1 for u in range(1, universe_size + 1) if holds(u)) >= k
