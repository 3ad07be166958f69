"""Unbounded fan-in AND/OR/NOT circuits over edge variables X_e, e in C([n], 2)."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .graphs import Graph, all_pairs, edge_index

KINDS = ("and", "or", "not", "input", "const")


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    inputs: tuple[int, ...] = ()
    edge: tuple[int, int] | None = None
    bit: int | None = None


@dataclass(frozen=True)
class Circuit:
    n_vertices: int
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        n = self.n_vertices
        for pos, g in enumerate(self.gates):
            if g.id != pos:
                raise ValueError(f"gate ids must be 0..size-1 in order (gate {g.id} at {pos})")
            if g.kind not in KINDS:
                raise ValueError(f"unknown gate kind {g.kind!r}")
            if any(not 0 <= i < g.id for i in g.inputs):
                raise ValueError(f"gate {g.id} has inputs that are not earlier gates")
            if g.kind == "not" and len(g.inputs) != 1:
                raise ValueError(f"NOT gate {g.id} needs exactly one input")
            if g.kind == "input":
                if g.edge is None or g.inputs:
                    raise ValueError(f"input gate {g.id} needs an edge and no inputs")
                u, v = g.edge
                if not (1 <= u < v <= n):
                    raise ValueError(f"input gate {g.id} edge {g.edge} invalid for n={n}")
            if g.kind == "const" and (g.bit not in (0, 1) or g.inputs):
                raise ValueError(f"const gate {g.id} needs bit 0/1 and no inputs")
        if not 0 <= self.output < len(self.gates):
            raise ValueError("output gate id out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        depth = [0] * len(self.gates)
        for g in self.gates:
            if g.inputs:
                depth[g.id] = 1 + max(depth[i] for i in g.inputs)
        return depth[self.output]

    def input_edges(self) -> list[tuple[int, int]]:
        """Distinct edges read by input gates, in canonical order."""
        edges = {g.edge for g in self.gates if g.kind == "input"}
        return sorted(edges)


class CircuitBuilder:
    def __init__(self, n_vertices: int):
        self.n = n_vertices
        self.gates: list[Gate] = []
        self._inputs: dict[tuple[int, int], int] = {}

    def _add(self, kind, inputs=(), edge=None, bit=None) -> int:
        gid = len(self.gates)
        self.gates.append(Gate(gid, kind, tuple(inputs), edge, bit))
        return gid

    def input(self, u: int, v: int) -> int:
        e = (min(u, v), max(u, v))
        if e not in self._inputs:
            self._inputs[e] = self._add("input", edge=e)
        return self._inputs[e]

    def const(self, bit: int) -> int:
        return self._add("const", bit=bit)

    def and_(self, inputs: Iterable[int]) -> int:
        return self._add("and", inputs)

    def or_(self, inputs: Iterable[int]) -> int:
        return self._add("or", inputs)

    def not_(self, x: int) -> int:
        return self._add("not", (x,))

    def build(self, output: int) -> Circuit:
        return Circuit(self.n, tuple(self.gates), output)


def _eval_gates(c: Circuit, leaf: Callable[[Gate], int], ones: int) -> int:
    """Evaluate with values packed in ints; ``ones`` is the all-true word."""
    val = [0] * len(c.gates)
    for g in c.gates:
        k = g.kind
        if k == "input":
            val[g.id] = leaf(g)
        elif k == "const":
            val[g.id] = ones if g.bit else 0
        elif k == "not":
            val[g.id] = val[g.inputs[0]] ^ ones
        elif k == "and":
            x = ones
            for i in g.inputs:
                x &= val[i]
            val[g.id] = x
        else:
            x = 0
            for i in g.inputs:
                x |= val[i]
            val[g.id] = x
    return val[c.output]


def eval_circuit(c: Circuit, g: Graph) -> int:
    if g.n != c.n_vertices:
        raise ValueError(f"circuit expects n={c.n_vertices}, graph has n={g.n}")
    bits = g.bits
    n = g.n
    return _eval_gates(c, lambda gate: bits >> edge_index(*gate.edge, n) & 1, 1)


def eval_circuit_parallel(c: Circuit, leaf: Callable[[tuple[int, int]], int], width: int) -> int:
    """Bit-parallel evaluation over ``width`` assignments at once.

    ``leaf(edge)`` returns the packed column of that edge's values.
    """
    return _eval_gates(c, lambda gate: leaf(gate.edge), (1 << width) - 1)


def hardwire(c: Circuit, h: Graph) -> Circuit:
    """Circuit computing G -> c(H ∪ G).

    X_e OR 1 folds to the constant 1 for edges of h and X_e OR 0 is X_e, so
    each input gate of an h-edge becomes CONST(1): size and depth never grow.
    """
    if h.n != c.n_vertices:
        raise ValueError(f"circuit expects n={c.n_vertices}, graph has n={h.n}")
    gates = []
    for g in c.gates:
        if g.kind == "input" and h.has_edge(*g.edge):
            gates.append(Gate(g.id, "const", (), None, 1))
        else:
            gates.append(g)
    return Circuit(c.n_vertices, tuple(gates), c.output)


# -- JSON ----------------------------------------------------------------------


def circuit_to_dict(c: Circuit) -> dict:
    gates = []
    for g in c.gates:
        d: dict = {"id": g.id, "kind": g.kind, "inputs": list(g.inputs)}
        if g.edge is not None:
            d["edge"] = list(g.edge)
        if g.bit is not None:
            d["bit"] = g.bit
        gates.append(d)
    return {"n_vertices": c.n_vertices, "gates": gates, "output": c.output}


def circuit_from_dict(doc: dict) -> Circuit:
    gates = []
    for d in doc["gates"]:
        edge = tuple(sorted(d["edge"])) if d.get("edge") is not None else None
        gates.append(Gate(int(d["id"]), d["kind"], tuple(int(i) for i in d.get("inputs", [])), edge, d.get("bit")))
    return Circuit(int(doc["n_vertices"]), tuple(gates), int(doc["output"]))


def dump_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=1) + "\n"


def load_circuit(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))


# -- DNF-shaped circuits -------------------------------------------------------


def dnf_terms(c: Circuit) -> list[list[tuple[tuple[int, int], bool]]] | None:
    """Terms of c if it is an OR of ANDs of (possibly negated) inputs, else None."""

    def literal(gid):
        g = c.gates[gid]
        if g.kind == "input":
            return (g.edge, True)
        if g.kind == "not" and c.gates[g.inputs[0]].kind == "input":
            return (c.gates[g.inputs[0]].edge, False)
        return None

    def term(gid):
        g = c.gates[gid]
        lit = literal(gid)
        if lit is not None:
            return [lit]
        if g.kind != "and":
            return None
        lits = [literal(i) for i in g.inputs]
        return None if any(x is None for x in lits) else lits

    top = c.gates[c.output]
    if top.kind == "or":
        terms = [term(i) for i in top.inputs]
        return None if any(t is None for t in terms) else terms
    single = term(c.output)
    return None if single is None else [single]


def term_vertex_length(term) -> int:
    return len({v for edge, _ in term for v in edge})


# -- circuit zoo ---------------------------------------------------------------


def const_circuit(n: int, bit: int = 1) -> Circuit:
    b = CircuitBuilder(n)
    return b.build(b.const(bit))


def edge_probe(n: int, u: int = 1, v: int = 2) -> Circuit:
    b = CircuitBuilder(n)
    x = b.input(u, v)
    return b.build(b.or_([b.and_([x])]))


def triangle_detector(n: int) -> Circuit:
    b = CircuitBuilder(n)
    for u, v in all_pairs(n):
        b.input(u, v)
    terms = [b.and_([b.input(x, y), b.input(x, z), b.input(y, z)]) for x, y, z in itertools.combinations(range(1, n + 1), 3)]
    return b.build(b.or_(terms))


def star_detector(n: int, size: int = 3) -> Circuit:
    """Some vertex outside {1..size} is adjacent to all of 1..size."""
    b = CircuitBuilder(n)
    hub = range(1, size + 1)
    terms = [b.and_([b.input(v, f) for f in hub]) for v in range(size + 1, n + 1)]
    return b.build(b.or_(terms))


def clique_probe(n: int, size: int = 4) -> Circuit:
    """The fixed set {1..size} spans a clique."""
    b = CircuitBuilder(n)
    xs = [b.input(u, v) for u, v in itertools.combinations(range(1, size + 1), 2)]
    return b.build(b.or_([b.and_(xs)]))


def _fast_const(adj: np.ndarray, vec: np.ndarray) -> bool:
    return True


def _fast_edge(adj: np.ndarray, vec: np.ndarray) -> bool:
    return bool(vec[0])


def _fast_triangle(adj: np.ndarray, vec: np.ndarray) -> bool:
    a = adj.astype(np.float32)
    return bool(((a @ a) * a).any())


def _fast_star(adj: np.ndarray, vec: np.ndarray, size: int = 3) -> bool:
    return bool(adj[size:, :size].all(axis=1).any())


def _fast_clique(adj: np.ndarray, vec: np.ndarray, size: int = 4) -> bool:
    sub = adj[:size, :size]
    return bool(sub.sum() == size * (size - 1))


@dataclass(frozen=True)
class ZooEntry:
    name: str
    build: Callable[[int], Circuit]
    fast: Callable[[np.ndarray, np.ndarray], bool]
    min_n: int


# ``fast`` evaluates on (adjacency matrix, edge vector); tests check it against
# gate-level evaluation of ``build(n)``.  Gate-level triangle circuits are
# cubic in n, which is why the Monte Carlo drivers use ``fast``.
ZOO: dict[str, ZooEntry] = {
    "const": ZooEntry("const", const_circuit, _fast_const, 1),
    "edge_probe": ZooEntry("edge_probe", edge_probe, _fast_edge, 2),
    "triangle": ZooEntry("triangle", triangle_detector, _fast_triangle, 3),
    "star": ZooEntry("star", star_detector, _fast_star, 4),
    "clique_probe": ZooEntry("clique_probe", clique_probe, _fast_clique, 4),
    "triangle_probe": ZooEntry("triangle_probe", lambda n: clique_probe(n, 3),
                               lambda adj, vec: _fast_clique(adj, vec, 3), 3),
}


def zoo_circuit(name: str, n: int) -> Circuit:
    try:
        entry = ZOO[name]
    except KeyError:
        raise ValueError(f"unknown zoo circuit {name!r}; choose from {sorted(ZOO)}") from None
    if n < entry.min_n:
        raise ValueError(f"{name} needs n >= {entry.min_n}")
    return entry.build(n)
