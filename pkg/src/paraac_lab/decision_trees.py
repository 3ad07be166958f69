"""Decision trees over edge variables, vertex height, and exact DTdepth_v.

The vertex height of a root-leaf path counts the distinct endpoints of the
edges queried on it; a vertex met twice is charged once.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

from .circuits import Circuit, dnf_terms, term_vertex_length
from .restrictions import (
    TABLE_CAP,
    EdgeFunction,
    cofactors,
    column_pattern,
    minterm_dnf,
    restrict_function,
    sample_restriction,
)
from .rng import RngStream
from .stats import wilson_interval


@dataclass(frozen=True)
class Leaf:
    bit: int


@dataclass(frozen=True)
class Node:
    edge: tuple[int, int]
    zero: "DecisionTree"
    one: "DecisionTree"


DecisionTree = Union[Leaf, Node]


def vertex_height(t: DecisionTree, _seen: frozenset = frozenset()) -> int:
    if isinstance(t, Leaf):
        return len(_seen)
    seen = _seen | set(t.edge)
    return max(vertex_height(t.zero, seen), vertex_height(t.one, seen))


def tree_table(t: DecisionTree, edges) -> int:
    """Truth table (over ``edges``) of the function computed by t."""
    edges = tuple(edges)
    m = len(edges)
    full = (1 << (1 << m)) - 1
    pos = {e: i for i, e in enumerate(edges)}

    def walk(node) -> int:
        if isinstance(node, Leaf):
            return full if node.bit else 0
        col = column_pattern(pos[node.edge], m) if m else 0
        return (walk(node.zero) & ~col & full) | (walk(node.one) & col)

    return walk(t)


def _relabel(edges) -> tuple[tuple[int, int], ...]:
    verts = sorted({v for e in edges for v in e})
    rank = {v: i for i, v in enumerate(verts)}
    return tuple((rank[u], rank[v]) for u, v in edges)


@functools.lru_cache(maxsize=1 << 20)
def _dt(edges: tuple[tuple[int, int], ...], table: int, charged: int) -> int:
    m = len(edges)
    full = (1 << (1 << m)) - 1
    if table == 0 or table == full:
        return 0
    best = math.inf
    for i, (u, v) in enumerate(edges):
        ends = (1 << u) | (1 << v)
        cost = (ends & ~charged).bit_count()
        if cost >= best:
            continue
        f0, f1 = cofactors(table, i, m)
        if f0 == f1:
            continue
        now = charged | ends
        sub = _dt(edges, f0, now)
        if cost + sub >= best:
            continue
        sub = max(sub, _dt(edges, f1, now))
        best = min(best, cost + sub)
    return best


def _check_size(f: EdgeFunction) -> None:
    if f.num_vars > TABLE_CAP:
        raise ValueError(f"{f.num_vars} variables exceeds the exact-search cap of {TABLE_CAP}")


def dt_depth_v(f: EdgeFunction) -> int:
    """Minimum vertex height over all decision trees computing f."""
    _check_size(f)
    return _dt(_relabel(f.edges), f.table, 0)


def optimal_tree(f: EdgeFunction) -> DecisionTree:
    """A decision tree for f whose vertex height equals dt_depth_v(f)."""
    _check_size(f)
    edges = _relabel(f.edges)
    m = len(edges)
    full = (1 << (1 << m)) - 1

    def build(table: int, charged: int) -> DecisionTree:
        if table == 0:
            return Leaf(0)
        if table == full:
            return Leaf(1)
        target = _dt(edges, table, charged)
        for i, (u, v) in enumerate(edges):
            f0, f1 = cofactors(table, i, m)
            if f0 == f1:
                continue
            ends = (1 << u) | (1 << v)
            now = charged | ends
            cost = (ends & ~charged).bit_count()
            if cost + max(_dt(edges, f0, now), _dt(edges, f1, now)) == target:
                return Node(f.edges[i], build(f0, now), build(f1, now))
        raise AssertionError("no query attains the optimum")

    return build(f.table, 0)


def all_trees(edges) -> list[DecisionTree]:
    """Every decision tree over ``edges`` that never repeats a query on a path."""
    edges = tuple(edges)

    @functools.lru_cache(maxsize=None)
    def trees(avail: frozenset) -> tuple:
        out = [Leaf(0), Leaf(1)]
        for e in sorted(avail):
            rest = trees(avail - {e})
            out.extend(Node(e, a, b) for a in rest for b in rest)
        return tuple(out)

    return list(trees(frozenset(edges)))


@functools.lru_cache(maxsize=64)
def exhaustive_depths(edges: tuple[tuple[int, int], ...]) -> dict[int, int]:
    """Least vertex height per truth table, over every tree on ``edges``."""
    best: dict[int, int] = {}
    for t in all_trees(edges):
        table = tree_table(t, edges)
        h = vertex_height(t)
        if h < best.get(table, math.inf):
            best[table] = h
    return best


def dt_depth_v_exhaustive(f: EdgeFunction) -> int:
    """Oracle twin of dt_depth_v by enumerating all trees (use with <= 3 variables)."""
    return exhaustive_depths(tuple(f.edges))[f.table]


# -- switching-lemma tail experiment -------------------------------------------


def beame_bound(q: float, p: float, r: int, s: int) -> float:
    """Right-hand side 8((2/q)^((s+r-1)/2) p r)^s / 3."""
    if s == 0:
        return 8 / 3
    ratio = 2 / q if q > 0 else math.inf
    base = ratio ** ((s + r - 1) / 2) * p * r
    if math.isnan(base):
        base = 0.0
    return 8 * base ** s / 3


def beame_hypothesis(q: float, p: float, r: int, s: int) -> bool:
    """p <= 1 / (r (2/q)^((r+s)/2))."""
    if r == 0:
        return True
    ratio = 2 / q if q > 0 else math.inf
    return p <= 1 / (r * ratio ** ((r + s) / 2))


def dnf_width(f) -> int:
    """Largest term vertex length r of a DNF for f.

    DNF-shaped circuits use their own terms; anything else falls back to the
    minterm DNF of the unrestricted function (table mode).
    """
    if isinstance(f, Circuit):
        terms = dnf_terms(f)
        if terms is not None:
            return max((term_vertex_length(t) for t in terms), default=0)
        return restricted_dnf_width(EdgeFunction.from_circuit(f))
    return restricted_dnf_width(f)


def restricted_dnf_width(f: EdgeFunction) -> int:
    return minterm_dnf(f).max_vertex_length


CSV_FIELDS = ("n", "ell", "q", "s", "r", "trials", "empirical_tail", "wilson_lo", "wilson_hi",
              "beame_bound", "hypothesis_ok", "seed")


@dataclass(frozen=True)
class TailResult:
    n: int
    ell: int
    q: float
    s: int
    r: int
    trials: int
    exceed: int
    empirical_tail: float
    wilson_lo: float
    wilson_hi: float
    beame_bound: float
    hypothesis_ok: bool
    seed: int

    @property
    def informative(self) -> bool:
        return self.hypothesis_ok and self.beame_bound < 1

    @property
    def consistent(self) -> bool:
        """Empirical tail does not contradict the bound when the bound applies."""
        return not self.informative or self.wilson_lo <= self.beame_bound

    def csv_row(self) -> list[str]:
        return [str(self.n), str(self.ell), repr(self.q), str(self.s), str(self.r), str(self.trials),
                repr(self.empirical_tail), repr(self.wilson_lo), repr(self.wilson_hi), repr(self.beame_bound),
                str(int(self.hypothesis_ok)), str(self.seed)]


def switching_tail(n: int, ell: int, q: float, f, s: int, trials: int, rng: RngStream,
                   r: int | None = None) -> TailResult:
    """Estimate Pr[DTdepth_v(f restricted by mu) > s] for mu ~ C^{ell,q}_n."""
    if q > 0.5:
        raise ValueError("the clique switching lemma needs q <= 1/2")
    if trials < 1:
        raise ValueError("need at least one trial")
    if math.comb(ell, 2) > TABLE_CAP:
        raise ValueError(f"ell={ell} gives more than {TABLE_CAP} free edges")
    if r is None:
        r = dnf_width(f)
    exceed = 0
    for t in range(trials):
        mu = sample_restriction(n, ell, q, rng.child(t))
        if dt_depth_v(restrict_function(f, mu)) > s:
            exceed += 1
    lo, hi = wilson_interval(exceed, trials)
    p = ell / n
    return TailResult(n, ell, q, s, r, trials, exceed, exceed / trials, lo, hi, beame_bound(q, p, r, s),
                      beame_hypothesis(q, p, r, s), rng.master_seed)

