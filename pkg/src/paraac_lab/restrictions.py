"""Clique restrictions on edge variables and boolean functions over edges.

A restriction over [n] stars every edge inside a vertex set U and fixes every
other edge to 0 or 1.  Restricting a function F by mu gives the function on
the starred edges S -> F(S ∪ mu).
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, eval_circuit_parallel
from .graphs import all_pairs, edge_index, num_pairs, pairs_mask
from .rng import RngStream, random_subset

TABLE_CAP = 10


@dataclass(frozen=True)
class Restriction:
    n: int
    star: tuple[int, ...]
    ones: int = 0  # bit e set iff edge e is fixed to 1
    star_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        star = tuple(sorted(set(self.star)))
        if any(not 1 <= v <= self.n for v in star):
            raise ValueError(f"star support {star} outside [{self.n}]")
        object.__setattr__(self, "star", star)
        mask = pairs_mask(star, self.n)
        object.__setattr__(self, "star_mask", mask)
        if self.ones & mask:
            raise ValueError("starred edges cannot also be fixed")
        if self.ones >> num_pairs(self.n):
            raise ValueError("fixed bits outside the edge table")

    @property
    def ell(self) -> int:
        return len(self.star)

    def star_edges(self) -> list[tuple[int, int]]:
        """Starred edges in canonical order (lexicographic over sorted U)."""
        return list(itertools.combinations(self.star, 2))

    def value(self, u: int, v: int):
        """0, 1 or None for a starred edge."""
        i = edge_index(u, v, self.n)
        if self.star_mask >> i & 1:
            return None
        return self.ones >> i & 1

    @property
    def fixed(self) -> dict[tuple[int, int], int]:
        return {e: self.value(*e) for e in all_pairs(self.n) if self.value(*e) is not None}

    @classmethod
    def all_star(cls, n: int) -> Restriction:
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def total(cls, n: int, ones: int) -> Restriction:
        return cls(n, (), ones)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "star": list(self.star),
            "fixed": {f"{u}-{v}": b for (u, v), b in self.fixed.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> Restriction:
        n = int(doc["n"])
        star = tuple(int(v) for v in doc["star"])
        fixed = doc.get("fixed", {})
        ones = 0
        seen = 0
        for key, bit in fixed.items():
            u, v = (int(x) for x in key.split("-"))
            i = edge_index(u, v, n)
            seen |= 1 << i
            if bit:
                ones |= 1 << i
        r = cls(n, star, ones)
        if seen != ((1 << num_pairs(n)) - 1) & ~r.star_mask:
            raise ValueError("fixed part must cover exactly the non-starred edges")
        return r

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def sample_restriction(n: int, ell: int, q: float, rng: RngStream) -> Restriction:
    """Draw from C^{ell,q}_n: uniform ell-subset U starred, the rest i.i.d. Bernoulli(q)."""
    if not 0 <= ell <= n:
        raise ValueError(f"ell={ell} outside [0, {n}]")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    gen = rng.generator()
    star = random_subset(gen, n, ell)
    m = num_pairs(n)
    draws = gen.random(m) < q
    ones = int.from_bytes(np.packbits(draws, bitorder="little").tobytes(), "little")
    return Restriction(n, tuple(star), ones & ~pairs_mask(star, n))


def compose_restrictions(mu: Restriction, pi: Restriction) -> Restriction:
    """mu ∘ pi, with pi living on mu's star block renumbered as [|U|].

    Vertex r of [|U|] is the r-th smallest element of U, so the e'-th edge of
    [|U|] is the e'-th starred edge of mu in canonical order.
    """
    if pi.n != mu.ell:
        raise ValueError(f"pi is over [{pi.n}] but mu stars {mu.ell} vertices")
    u = mu.star
    ones = mu.ones
    for (a, b), bit in pi.fixed.items():
        if bit:
            ones |= 1 << edge_index(u[a - 1], u[b - 1], mu.n)
    return Restriction(mu.n, tuple(u[r - 1] for r in pi.star), ones)


# -- boolean functions over edges ---------------------------------------------


@dataclass(frozen=True)
class EdgeFunction:
    """Truth table over an ordered list of edge variables.

    Row r assigns edges[i] the value of bit i of r; bit r of ``table`` is F(row r).
    """

    edges: tuple[tuple[int, int], ...]
    table: int

    def __post_init__(self):
        if len(self.edges) > 20:
            raise ValueError("truth tables limited to 20 variables")
        if self.table < 0 or self.table >> (1 << len(self.edges)):
            raise ValueError("table wider than 2^m rows")

    @property
    def num_vars(self) -> int:
        return len(self.edges)

    @property
    def full(self) -> int:
        return (1 << (1 << len(self.edges))) - 1

    def is_constant(self) -> bool:
        return self.table == 0 or self.table == self.full

    def __call__(self, row: int) -> int:
        return self.table >> row & 1

    def value_at(self, assignment: dict[tuple[int, int], int]) -> int:
        row = 0
        for i, e in enumerate(self.edges):
            if assignment[e]:
                row |= 1 << i
        return self(row)

    @classmethod
    def constant(cls, bit: int, edges=()) -> EdgeFunction:
        edges = tuple(edges)
        return cls(edges, ((1 << (1 << len(edges))) - 1) if bit else 0)

    @classmethod
    def literal(cls, u: int, v: int) -> EdgeFunction:
        return cls(((min(u, v), max(u, v)),), 0b10)

    @classmethod
    def from_circuit(cls, c: Circuit, edges=None) -> EdgeFunction:
        """Truth table of c over ``edges`` (default: the edges it reads)."""
        edges = tuple(c.input_edges() if edges is None else edges)
        if len(edges) > 20:
            raise ValueError(f"circuit reads {len(edges)} edges; too many for a table")
        cols = {e: column_pattern(i, len(edges)) for i, e in enumerate(edges)}

        def leaf(e):
            if e not in cols:
                raise ValueError(f"circuit reads edge {e} outside the variable list")
            return cols[e]

        return cls(edges, eval_circuit_parallel(c, leaf, 1 << len(edges)))

    def support(self) -> list[int]:
        return [i for i in range(self.num_vars) if depends_on(self.table, i, self.num_vars)]


@functools.lru_cache(maxsize=None)
def column_pattern(i: int, m: int) -> int:
    """Packed truth column of variable i among m (bit r = bit i of r)."""
    block = 1 << i
    unit = ((1 << block) - 1) << block  # block zeros then block ones
    word = 0
    for start in range(0, 1 << m, 2 * block):
        word |= unit << start
    return word


_MASK_CACHE: dict[tuple[int, int], int] = {}


def _low_mask(i: int, m: int) -> int:
    key = (i, m)
    if key not in _MASK_CACHE:
        _MASK_CACHE[key] = column_pattern(i, m) ^ ((1 << (1 << m)) - 1)
    return _MASK_CACHE[key]


def cofactors(table: int, i: int, m: int) -> tuple[int, int]:
    """Tables of F|x_i=0 and F|x_i=1, still over all m variables."""
    lo_mask = _low_mask(i, m)
    shift = 1 << i
    lo = table & lo_mask
    hi = table & ~lo_mask
    return lo | (lo << shift), hi | (hi >> shift)


def depends_on(table: int, i: int, m: int) -> bool:
    f0, f1 = cofactors(table, i, m)
    return f0 != f1


def restrict_function(f, mu: Restriction, cap: int = TABLE_CAP) -> EdgeFunction:
    """F restricted by mu, as a truth table over mu's starred edges.

    ``f`` is a :class:`Circuit` over [mu.n] or an :class:`EdgeFunction`
    whose variables are edges of [mu.n].
    """
    star_edges = mu.star_edges()
    m = len(star_edges)
    if m > cap:
        raise ValueError(f"star block has {m} free edges; table mode allows at most {cap}")
    col = {e: column_pattern(i, m) for i, e in enumerate(star_edges)}
    width = 1 << m
    ones = (1 << width) - 1

    def leaf(e):
        if e in col:
            return col[e]
        return ones if mu.value(*e) else 0

    if isinstance(f, Circuit):
        if f.n_vertices != mu.n:
            raise ValueError(f"circuit over n={f.n_vertices}, restriction over n={mu.n}")
        return EdgeFunction(tuple(star_edges), eval_circuit_parallel(f, leaf, width))
    # generic table: look up the completed row for every assignment of the stars
    for e in f.edges:
        edge_index(*e, mu.n)
    table = 0
    base = 0
    free = []
    for j, e in enumerate(f.edges):
        if e in col:
            free.append((j, star_edges.index(e)))
        elif mu.value(*e):
            base |= 1 << j
    for s in range(width):
        row = base
        for j, i in free:
            if s >> i & 1:
                row |= 1 << j
        if f.table >> row & 1:
            table |= 1 << s
    return EdgeFunction(tuple(star_edges), table)


# -- DNF view -----------------------------------------------------------------


@dataclass(frozen=True)
class Dnf:
    """Minterm DNF over the support variables; each term maps edge -> bit."""

    terms: tuple[tuple[tuple[tuple[int, int], int], ...], ...]
    max_vertex_length: int

    @property
    def is_tautology(self) -> bool:
        return len(self.terms) == 1 and not self.terms[0]


def minterm_dnf(f: EdgeFunction) -> Dnf:
    m = f.num_vars
    if m > TABLE_CAP:
        raise ValueError(f"{m} variables exceeds the table cap of {TABLE_CAP}")
    sup = f.support()
    terms = []
    seen = set()
    for row in range(1 << m):
        if not f(row):
            continue
        key = tuple((f.edges[i], row >> i & 1) for i in sup)
        if key not in seen:
            seen.add(key)
            terms.append(key)
    terms.sort(key=lambda t: [b for _, b in t])
    r = max((len({v for e, _ in t for v in e}) for t in terms), default=0)
    return Dnf(tuple(terms), r)


def restricted_dnf(f, mu: Restriction) -> Dnf:
    """Canonical minterm DNF of F restricted by mu plus its largest term vertex length."""
    return minterm_dnf(restrict_function(f, mu))


# -- asymptotic schedule --------------------------------------------------------


def _floor(x: float) -> int:
    # snap values within rounding noise of an integer before flooring
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


@dataclass(frozen=True)
class Schedule:
    n: int
    k: float
    S: int
    d: int
    q: float
    s: int
    ell: tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return any(x == 0 for x in self.ell)

    @property
    def shrink(self) -> float:
        """n^(5s/k), the per-level shrink factor."""
        return self.n ** (5 * self.s / self.k)


def restriction_schedule(n: int, k: float, S: int, d: int) -> Schedule:
    if n < 2:
        raise ValueError("n must be at least 2")
    if k <= 0:
        raise ValueError("k must be positive")
    if S < n:
        raise ValueError(f"size bound S={S} must be at least n={n}")
    if d < 1:
        raise ValueError("depth must be at least 1")
    q = n ** (-1.0 / k)
    log_sd = math.log(S * d) / math.log(n)
    s = _floor(math.sqrt(k * log_sd))
    shrink = n ** (5 * s / k)
    ell = [n]
    for _ in range(d):
        ell.append(_floor(ell[-1] / shrink))
    return Schedule(n, k, S, d, q, s, tuple(ell))
