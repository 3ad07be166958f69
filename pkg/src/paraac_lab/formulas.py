"""Alternating AND/OR propositional formulas and weighted satisfiability.

A formula is a tree of :class:`And`, :class:`Or` and :class:`Lit` nodes.  The
Hamming weight of an assignment is counted over the formula's own variable
set: every variable occurring in it plus any declared on an And/Or node via
``universe`` (needed so that e.g. the clause set of a complete graph still
ranges over one variable per vertex).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .graphs import Graph


@dataclass(frozen=True)
class Lit:
    var: str
    positive: bool = True

    def __repr__(self) -> str:
        return self.var if self.positive else f"~{self.var}"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...] = ()
    universe: tuple[str, ...] = field(default=(), compare=True)


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...] = ()
    universe: tuple[str, ...] = field(default=(), compare=True)


Formula = Union[And, Or, Lit]


def pos(var: str) -> Lit:
    return Lit(var, True)


def neg(var: str) -> Lit:
    return Lit(var, False)


def variables(f: Formula) -> list[str]:
    """Sorted variable set (occurring plus declared)."""
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Lit):
            out.add(node.var)
        else:
            out.update(node.universe)
            stack.extend(node.children)
    return sorted(out, key=_natural_key)


def _natural_key(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def literals(f: Formula) -> list[Lit]:
    out = []
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Lit):
            out.append(node)
        else:
            stack.extend(node.children)
    return out


def evaluate(f: Formula, assignment: dict[str, bool]) -> bool:
    if isinstance(f, Lit):
        return assignment[f.var] == f.positive
    if isinstance(f, And):
        return all(evaluate(c, assignment) for c in f.children)
    return any(evaluate(c, assignment) for c in f.children)


# -- shape classes ---------------------------------------------------------


@dataclass(frozen=True)
class GammaShape:
    t: int
    d: int
    negative_only: bool = False

    def __post_init__(self):
        if self.t < 0 or self.d < 1:
            raise ValueError("need t >= 0 and d >= 1")


def _in_gamma(f: Formula, t: int, d: int) -> bool:
    if isinstance(f, Lit):
        return True
    if t == 0:
        return isinstance(f, And) and len(f.children) <= d and all(isinstance(c, Lit) for c in f.children)
    if isinstance(f, And):
        return all(_in_delta(c, t - 1, d) for c in f.children)
    # singleton conjunction around a disjunction
    return _in_delta(f, t - 1, d)


def _in_delta(f: Formula, t: int, d: int) -> bool:
    if isinstance(f, Lit):
        return True
    if t == 0:
        return isinstance(f, Or) and len(f.children) <= d and all(isinstance(c, Lit) for c in f.children)
    if isinstance(f, Or):
        return all(_in_gamma(c, t - 1, d) for c in f.children)
    return _in_gamma(f, t - 1, d)


def validate_shape(f: Formula, shape: GammaShape) -> bool:
    """Membership in Gamma_{t,d} (or its negative-literal fragment)."""
    if shape.negative_only and any(lit.positive for lit in literals(f)):
        return False
    return _in_gamma(f, shape.t, shape.d)


# -- weighted satisfiability -------------------------------------------------

_TABLE_LIMIT = 22


def _truth_vector(f: Formula, index: dict[str, int], cols: np.ndarray) -> np.ndarray:
    if isinstance(f, Lit):
        col = (cols >> index[f.var]) & 1
        return col.astype(bool) if f.positive else ~col.astype(bool)
    if isinstance(f, And):
        out = np.ones(cols.shape, dtype=bool)
        for c in f.children:
            out &= _truth_vector(c, index, cols)
        return out
    out = np.zeros(cols.shape, dtype=bool)
    for c in f.children:
        out |= _truth_vector(c, index, cols)
    return out


def satisfying_weights(f: Formula) -> set[int]:
    """All Hamming weights of satisfying assignments (exhaustive)."""
    names = variables(f)
    m = len(names)
    if m > _TABLE_LIMIT:
        raise ValueError(f"{m} variables is too many for exhaustive enumeration")
    index = {v: i for i, v in enumerate(names)}
    rows = np.arange(1 << m, dtype=np.int64)
    sat = _truth_vector(f, index, rows)
    weights = np.zeros(rows.shape, dtype=np.int64)
    for i in range(m):
        weights += (rows >> i) & 1
    return set(np.unique(weights[sat]).tolist())


def weighted_sat_bruteforce(f: Formula, k: int) -> bool:
    """Is there a satisfying assignment setting exactly k variables true?"""
    names = variables(f)
    if k < 0 or k > len(names):
        return False
    if len(names) <= _TABLE_LIMIT:
        return k in satisfying_weights(f)
    for chosen in itertools.combinations(names, k):
        on = set(chosen)
        if evaluate(f, {v: v in on for v in names}):
            return True
    return False


def max_weight_omega(f: Formula) -> int:
    """Largest weight of a satisfying assignment of a negative-only formula."""
    if any(lit.positive for lit in literals(f)):
        raise ValueError("maximum weight is only defined here for negative-only formulas")
    weights = satisfying_weights(f)
    if not weights:
        # only possible through an empty OR somewhere
        raise ValueError("formula is unsatisfiable")
    return max(weights)


def build_delta_g(g: Graph) -> And:
    """Conjunction of (~X_u | ~X_v) over the non-edges of g.

    Weight-k satisfying assignments are exactly the k-cliques of g.
    """
    clauses = []
    for u, v in itertools.combinations(range(1, g.n + 1), 2):
        if not g.has_edge(u, v):
            clauses.append(Or((neg(f"x{u}"), neg(f"x{v}"))))
    return And(tuple(clauses), universe=tuple(f"x{v}" for v in range(1, g.n + 1)))


def gamma11_decide(f: Formula, k: int) -> bool:
    """Closed-form weighted satisfiability for conjunctions of literals.

    Satisfiable at weight k iff no variable occurs with both signs and
    #positive <= k <= #vars - #negative.
    """
    if not validate_shape(f, GammaShape(1, 1)):
        raise ValueError("formula is not a conjunction of single literals")
    lits = literals(f)
    positive = {lit.var for lit in lits if lit.positive}
    negative = {lit.var for lit in lits if not lit.positive}
    if positive & negative:
        return False
    return len(positive) <= k <= len(variables(f)) - len(negative)


# -- s-expression text format ----------------------------------------------

_VAR = re.compile(r"[A-Za-z0-9_]+\Z")
_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def format_formula(f: Formula) -> str:
    if isinstance(f, Lit):
        return f.var if f.positive else f"(not {f.var})"
    head = "and" if isinstance(f, And) else "or"
    parts = [head]
    if f.universe:
        parts.append("(vars " + " ".join(f.universe) + ")")
    parts.extend(format_formula(c) for c in f.children)
    return "(" + " ".join(parts) + ")"


def parse_formula(text: str) -> Formula:
    """Parse e.g. ``(and (or (not x1) (not x3)))``.

    An optional ``(vars a b ...)`` right after ``and``/``or`` declares
    variables that do not otherwise occur.
    """
    tokens = _TOKEN.findall(text)
    pos_ = 0

    def atom(tok: str) -> str:
        if not _VAR.match(tok):
            raise ValueError(f"bad variable name {tok!r}")
        return tok

    def expr():
        nonlocal pos_
        if pos_ >= len(tokens):
            raise ValueError("unexpected end of formula")
        tok = tokens[pos_]
        pos_ += 1
        if tok == ")":
            raise ValueError("unexpected ')'")
        if tok != "(":
            return Lit(atom(tok))
        head = tokens[pos_] if pos_ < len(tokens) else None
        pos_ += 1
        if head == "not":
            inner = expr()
            if not isinstance(inner, Lit) or not inner.positive:
                raise ValueError("'not' applies to variables only")
            close()
            return Lit(inner.var, False)
        if head not in ("and", "or"):
            raise ValueError(f"unknown operator {head!r}")
        universe: tuple[str, ...] = ()
        if pos_ + 1 < len(tokens) and tokens[pos_] == "(" and tokens[pos_ + 1] == "vars":
            pos_ += 2
            names = []
            while pos_ < len(tokens) and tokens[pos_] != ")":
                names.append(atom(tokens[pos_]))
                pos_ += 1
            close()
            universe = tuple(names)
        children = []
        while pos_ < len(tokens) and tokens[pos_] != ")":
            children.append(expr())
        close()
        node = And if head == "and" else Or
        return node(tuple(children), universe)

    def close():
        nonlocal pos_
        if pos_ >= len(tokens) or tokens[pos_] != ")":
            raise ValueError("missing ')'")
        pos_ += 1

    result = expr()
    if pos_ != len(tokens):
        raise ValueError("trailing tokens after formula")
    return result
