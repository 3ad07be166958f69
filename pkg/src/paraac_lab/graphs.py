"""Simple undirected graphs on [n] stored as a bit table over the potential edges.

Vertices are 1-based.  Potential edge {u, v} with u < v sits at the canonical
index of the pair in lexicographic order: (1,2), (1,3), ..., (1,n), (2,3), ...
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int, n: int) -> int:
    """Canonical index of the pair {u, v} among the C(n,2) potential edges."""
    if u > v:
        u, v = v, u
    if not (1 <= u < v <= n):
        raise ValueError(f"invalid edge {{{u},{v}}} for n={n}")
    return (u - 1) * n - (u - 1) * u // 2 + (v - u - 1)


def all_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


def pairs_mask(vertices: Iterable[int], n: int) -> int:
    """Bit mask of all edges inside ``vertices``."""
    vs = sorted(set(vertices))
    mask = 0
    for u, v in itertools.combinations(vs, 2):
        mask |= 1 << edge_index(u, v, n)
    return mask


_TRIU_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _triu(n: int) -> tuple[np.ndarray, np.ndarray]:
    # row-major upper triangle matches the canonical edge order
    if n not in _TRIU_CACHE:
        _TRIU_CACHE[n] = np.triu_indices(n, k=1)
    return _TRIU_CACHE[n]


@dataclass(frozen=True, eq=True)
class Graph:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if self.bits < 0 or self.bits >> num_pairs(self.n):
            raise ValueError("edge bits outside the C(n,2) table")

    # construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        bits = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            bits |= 1 << edge_index(u, v, n)
        return cls(n, bits)

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, (1 << num_pairs(n)) - 1)

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, 0)

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @classmethod
    def from_edge_vector(cls, n: int, vec: np.ndarray) -> Graph:
        vec = np.asarray(vec, dtype=bool)
        if vec.shape != (num_pairs(n),):
            raise ValueError("edge vector has wrong length")
        packed = np.packbits(vec, bitorder="little").tobytes()
        g = cls(n, int.from_bytes(packed, "little"))
        frozen = vec.copy()
        frozen.flags.writeable = False
        g.__dict__["edge_vector"] = frozen
        return g

    # queries ----------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(self.bits >> edge_index(u, v, self.n) & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        bits = self.bits
        for i, e in enumerate(all_pairs(self.n)):
            if bits >> i & 1:
                yield e

    @property
    def num_edges(self) -> int:
        return self.bits.bit_count()

    @cached_property
    def edge_vector(self) -> np.ndarray:
        m = num_pairs(self.n)
        raw = self.bits.to_bytes((m + 7) // 8, "little")
        vec = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little", count=m).astype(bool)
        vec.flags.writeable = False
        return vec

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix, 0-based rows/columns."""
        a = np.zeros((self.n, self.n), dtype=bool)
        r, c = _triu(self.n)
        a[r, c] = self.edge_vector
        a |= a.T
        a.flags.writeable = False
        return a

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Per-vertex neighbourhood as an int bitset (bit v-1 for vertex v)."""
        nb = [0] * self.n
        for u, v in self.edges():
            nb[u - 1] |= 1 << (v - 1)
            nb[v - 1] |= 1 << (u - 1)
        return tuple(nb)

    def degree(self, v: int) -> int:
        return self.neighbor_masks[v - 1].bit_count()

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.has_edge(u, v) for u, v in itertools.combinations(vs, 2))

    def is_dominating(self, vertices: Iterable[int]) -> bool:
        dominated = 0
        for v in vertices:
            dominated |= self.neighbor_masks[v - 1] | 1 << (v - 1)
        return dominated == (1 << self.n) - 1

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges())})"


def check_vertex_set(vertices: Iterable[int], n: int) -> frozenset[int]:
    vs = frozenset(vertices)
    bad = [v for v in vs if not 1 <= v <= n]
    if bad:
        raise ValueError(f"vertices {sorted(bad)} outside [{n}]")
    return vs


def plant_clique(g: Graph, a: Iterable[int]) -> Graph:
    """G + C(A): add every edge inside ``a``."""
    vs = check_vertex_set(a, g.n)
    return Graph(g.n, g.bits | pairs_mask(vs, g.n))


def union_graphs(g: Graph, h: Graph) -> Graph:
    if g.n != h.n:
        raise ValueError(f"vertex counts differ: {g.n} vs {h.n}")
    return Graph(g.n, g.bits | h.bits)


def all_graphs(n: int) -> Iterator[Graph]:
    for bits in range(1 << num_pairs(n)):
        yield Graph(n, bits)


# -- clique ----------------------------------------------------------------


def _color_sort(p: int, nb: tuple[int, ...]) -> tuple[list[int], list[int]]:
    order: list[int] = []
    colors: list[int] = []
    color = 0
    uncolored = p
    while uncolored:
        color += 1
        q = uncolored
        while q:
            low = q & -q
            v = low.bit_length() - 1
            q &= ~nb[v] & ~low
            uncolored &= ~low
            order.append(v)
            colors.append(color)
    return order, colors


def _clique_search(nb: tuple[int, ...], n: int, target: int | None) -> int:
    """Branch and bound with greedy-colouring bounds (MCQ style).

    Returns the clique number, or stops early once ``target`` is reached.
    """
    best = 0
    stop = target if target is not None else n + 1

    def expand(size: int, p: int) -> bool:
        nonlocal best
        order, colors = _color_sort(p, nb)
        for i in range(len(order) - 1, -1, -1):
            if size + colors[i] <= best:
                return False
            v = order[i]
            newp = p & nb[v]
            if newp:
                if expand(size + 1, newp):
                    return True
            elif size + 1 > best:
                best = size + 1
                if best >= stop:
                    return True
            p &= ~(1 << v)
        return False

    if n:
        expand(0, (1 << n) - 1)
    return best


def max_clique_size(g: Graph) -> int:
    return _clique_search(g.neighbor_masks, g.n, None)


def has_clique(g: Graph, k: int) -> bool:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return True
    if k > g.n:
        return False
    return _clique_search(g.neighbor_masks, g.n, k) >= k


def max_clique_size_exhaustive(g: Graph) -> int:
    for k in range(g.n, 0, -1):
        if has_clique_exhaustive(g, k):
            return k
    return 0


def has_clique_exhaustive(g: Graph, k: int) -> bool:
    return any(g.is_clique(s) for s in itertools.combinations(range(1, g.n + 1), k))


# -- dominating set --------------------------------------------------------


def has_dominating_set_of_size(g: Graph, k: int) -> bool:
    """Exact: is there a dominating set with exactly k vertices?

    Supersets of dominating sets dominate, so this is ``min DS <= k <= n``.
    Search branches on the closed neighbourhood of the undominated vertex with
    the fewest possible dominators.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = g.n
    if k > n:
        return False
    if n == 0:
        return True
    closed = [m | 1 << v for v, m in enumerate(g.neighbor_masks)]
    full = (1 << n) - 1
    failed: dict[int, int] = {}

    def search(undominated: int, budget: int) -> bool:
        if not undominated:
            return True
        if budget == 0:
            return False
        if failed.get(undominated, -1) >= budget:
            return False
        need = undominated.bit_count()
        best_cov = 0
        pick, pick_size = -1, n + 1
        rest = undominated
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            size = closed[v].bit_count()
            if size < pick_size:
                pick, pick_size = v, size
        cover = []
        cands = closed[pick]
        while cands:
            low = cands & -cands
            u = low.bit_length() - 1
            cands ^= low
            cover.append(((closed[u] & undominated).bit_count(), u))
        for u in range(n):
            c = (closed[u] & undominated).bit_count()
            if c > best_cov:
                best_cov = c
        if need > budget * best_cov:
            failed[undominated] = budget
            return False
        cover.sort(reverse=True)
        for _, u in cover:
            if search(undominated & ~closed[u], budget - 1):
                return True
        failed[undominated] = budget
        return False

    return search(full, k)


def has_dominating_set_exhaustive(g: Graph, k: int) -> bool:
    return any(g.is_dominating(s) for s in itertools.combinations(range(1, g.n + 1), k))


# -- text format -----------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse "n m" followed by m lines "u v" (1-based, u < v).

    Lines starting with '#' are treated as comments.
    """
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty graph file")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        raise ValueError(f"header declares {m} edges, found {len(rows) - 1}")
    bits = 0
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"edge {u} {v} out of range for n={n}")
        if u > v:
            raise ValueError(f"edge {u} {v} must be written with u < v")
        bit = 1 << edge_index(u, v, n)
        if bits & bit:
            raise ValueError(f"duplicate edge {u} {v}")
        bits |= bit
    return Graph(n, bits)
