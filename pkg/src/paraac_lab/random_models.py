"""Erdős–Rényi and planted-clique samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, _triu, num_pairs
from .rng import RngStream, bernoulli, random_subset


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability {p} outside [0, 1]")


def sample_er_vector(n: int, p: float, gen: np.random.Generator) -> np.ndarray:
    _check_probability(p)
    return bernoulli(gen, p, num_pairs(n))


def sample_er(n: int, p: float, rng: RngStream) -> Graph:
    return Graph.from_edge_vector(n, sample_er_vector(n, p, rng.generator()))


@dataclass(frozen=True)
class PlantedSample:
    base: Graph
    planted_set: tuple[int, ...]
    planted_graph: Graph


def planted_vectors(n: int, p: float, c: int, gen: np.random.Generator) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Raw (G, A, G + C(A)) as edge vectors; the fast path for Monte Carlo."""
    if not 0 <= c <= n:
        raise ValueError(f"planted size {c} outside [0, {n}]")
    base = sample_er_vector(n, p, gen)
    a = random_subset(gen, n, c)
    planted = base.copy()
    if c >= 2:
        idx = np.asarray(a) - 1
        mat = np.zeros((n, n), dtype=bool)
        mat[np.ix_(idx, idx)] = True
        r, col = _triu(n)
        planted |= mat[r, col]
    return base, a, planted


def sample_planted(n: int, p: float, c: int, rng: RngStream) -> PlantedSample:
    if c > n:
        raise ValueError(f"planted size {c} exceeds n={n}")
    base, a, planted = planted_vectors(n, p, c, rng.generator())
    return PlantedSample(Graph.from_edge_vector(n, base), tuple(a), Graph.from_edge_vector(n, planted))


def bridge_probability(n: int, k: float, k_prime: float) -> float:
    """Edge probability p with p + (1-p) n^(-1/k) = n^(-1/k').

    A graph drawn from ER(n, p) united with an independent ER(n, n^(-1/k))
    graph is distributed as ER(n, n^(-1/k')).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if k <= 0 or k_prime <= 0:
        raise ValueError("k and k' must be positive")
    if k_prime < k:
        raise ValueError(f"k'={k_prime} must be at least k={k}")
    lo = n ** (-1.0 / k)
    hi = n ** (-1.0 / k_prime)
    return max(0.0, (hi - lo) / (1.0 - lo))


def planted_edge_marginal(n: int, p: float, c: int) -> float:
    """Pr[a fixed edge is present in G + C(A)] for (G, A) ~ ER(n, p, c)."""
    inside = math.comb(n - 2, c - 2) / math.comb(n, c) if c >= 2 else 0.0
    return p + (1 - p) * inside
