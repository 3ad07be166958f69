"""Parameterized reduction from k-clique to dominating set of size k + C(k,2).

Vertices of the target graph H are laid out block by block:

* (a) for i = 1..k: ``new(i)`` then the copy ``v(i)`` of each v in V;
* (b) for i < j: tuples ``(i,j,u(i),v(j))`` for u, v in V (lexicographic);
* (c) for i < j: ``new(i,j)`` then the copy ``{u,v}(i,j)`` of each edge.

Blocks (a) and (c) are cliques; a tuple vertex is joined to every u'(i) with
u' != u, every v'(j) with v' != v, and to {u,v}(i,j) when {u,v} is an edge.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field

from .graphs import (
    Graph,
    all_graphs,
    edge_index,
    format_graph,
    has_clique,
    has_dominating_set_of_size,
    num_pairs,
)
from .random_models import sample_er
from .rng import RngStream


def target_size(k: int) -> int:
    """New parameter k + C(k,2); depends on k alone."""
    return k + math.comb(k, 2)


def expected_vertex_count(n: int, m: int, k: int) -> int:
    pairs = math.comb(k, 2)
    return k * (1 + n) + pairs * n * n + pairs * (1 + m)


@dataclass(frozen=True)
class DsInstance:
    graph: Graph
    target_size: int
    labels: dict[int, str] = field(compare=False)
    index: dict[tuple, int] = field(compare=False, repr=False)

    def vertex(self, key: tuple) -> int:
        """Vertex number of a structured key, e.g. ("v", i, v) or ("e", i, j, u, v)."""
        return self.index[key]

    def sidecar_json(self) -> str:
        doc = {"target_size": self.target_size, "labels": {str(v): lab for v, lab in sorted(self.labels.items())}}
        return json.dumps(doc, indent=1) + "\n"


def reduce_clique_to_ds(g: Graph, k: int) -> DsInstance:
    if k < 2:
        raise ValueError("the reduction needs k >= 2")
    if g.num_edges == 0:
        raise ValueError("the reduction needs a nonempty edge set")
    n = g.n
    edges = list(g.edges())
    pairs = list(itertools.combinations(range(1, k + 1), 2))

    index: dict[tuple, int] = {}
    labels: dict[int, str] = {}

    def add(key: tuple, label: str) -> None:
        vid = len(index) + 1
        index[key] = vid
        labels[vid] = label

    for i in range(1, k + 1):
        add(("new", i), f"new({i})")
        for v in range(1, n + 1):
            add(("v", i, v), f"{v}({i})")
    for i, j in pairs:
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                add(("t", i, j, u, v), f"({i},{j},{u}({i}),{v}({j}))")
    for i, j in pairs:
        add(("new", i, j), f"new({i},{j})")
        for u, v in edges:
            add(("e", i, j, u, v), f"{{{u},{v}}}({i},{j})")

    size = len(index)
    bits = 0

    def join(a: int, b: int) -> None:
        nonlocal bits
        bits |= 1 << edge_index(a, b, size)

    def make_clique(ids: list[int]) -> None:
        for a, b in itertools.combinations(ids, 2):
            join(a, b)

    for i in range(1, k + 1):
        make_clique([index[("new", i)]] + [index[("v", i, v)] for v in range(1, n + 1)])
    for i, j in pairs:
        make_clique([index[("new", i, j)]] + [index[("e", i, j, u, v)] for u, v in edges])
    for i, j in pairs:
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                t = index[("t", i, j, u, v)]
                for w in range(1, n + 1):
                    if w != u:
                        join(t, index[("v", i, w)])
                    if w != v:
                        join(t, index[("v", j, w)])
                if u != v and g.has_edge(u, v):
                    a, b = min(u, v), max(u, v)
                    join(t, index[("e", i, j, a, b)])

    return DsInstance(Graph(size, bits), target_size(k), labels, index)


def clique_to_ds_witness(g: Graph, clique, inst: DsInstance) -> list[int]:
    """The dominating set D(C) built from a k-clique C (sorted vertex ids)."""
    members = sorted(clique)
    k = len(members)
    if not g.is_clique(members):
        raise ValueError("input is not a clique")
    if inst.target_size != target_size(k):
        raise ValueError("clique size does not match the instance parameter")
    d = [inst.vertex(("v", i, members[i - 1])) for i in range(1, k + 1)]
    for i, j in itertools.combinations(range(1, k + 1), 2):
        a, b = sorted((members[i - 1], members[j - 1]))
        d.append(inst.vertex(("e", i, j, a, b)))
    if not inst.graph.is_dominating(d):
        raise AssertionError("constructed set fails to dominate")
    return sorted(d)


# -- verification harness ----------------------------------------------------


@dataclass
class EquivalenceReport:
    mode: str
    n: int
    ks: list[int]
    graphs: int = 0
    checked: int = 0
    skipped_edgeless: int = 0
    witnesses_checked: int = 0
    mismatches: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "mode": self.mode,
            "n": self.n,
            "ks": self.ks,
            "graphs": self.graphs,
            "checked": self.checked,
            "skipped_edgeless": self.skipped_edgeless,
            "witnesses_checked": self.witnesses_checked,
            "mismatches": self.mismatches,
        }
        if timing:
            d["elapsed_seconds"] = self.elapsed
        return d


EXHAUSTIVE_LIMIT = 4


def _check_pair(g: Graph, k: int, report: EquivalenceReport) -> None:
    inst = reduce_clique_to_ds(g, k)
    want = has_clique(g, k)
    got = has_dominating_set_of_size(inst.graph, inst.target_size)
    report.checked += 1
    if want != got:
        report.mismatches.append({"edges": list(g.edges()), "n": g.n, "k": k, "clique": want, "dominating_set": got})
        return
    if want:
        for c in itertools.combinations(range(1, g.n + 1), k):
            if g.is_clique(c):
                clique_to_ds_witness(g, c, inst)
                report.witnesses_checked += 1
                break


def verify_equivalence(n_max: int, ks, mode: str = "exhaustive", count: int = 0, rng: RngStream | None = None,
                       p: float = 0.5) -> EquivalenceReport:
    """Compare clique and dominating-set answers across the reduction."""
    ks = sorted(set(ks))
    report = EquivalenceReport(mode, n_max, ks)
    start = time.perf_counter()
    if mode == "exhaustive":
        if n_max > EXHAUSTIVE_LIMIT:
            est = 2 ** num_pairs(n_max) * len(ks)
            raise ValueError(f"exhaustive mode limited to n <= {EXHAUSTIVE_LIMIT}; n={n_max} needs {est} reductions")
        graphs = all_graphs(n_max)
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an RngStream")
        graphs = (sample_er(n_max, p, rng.child(i)) for i in range(count))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for g in graphs:
        report.graphs += 1
        if g.num_edges == 0:
            report.skipped_edgeless += 1
            continue
        for k in ks:
            _check_pair(g, k, report)
    report.elapsed = time.perf_counter() - start
    return report


def write_instance(inst: DsInstance, graph_path, sidecar_path) -> None:
    with open(graph_path, "w") as fh:
        fh.write(format_graph(inst.graph))
    with open(sidecar_path, "w") as fh:
        fh.write(inst.sidecar_json())
