import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraac_lab.circuits import CircuitBuilder, zoo_circuit
from paraac_lab.decision_trees import (
    Leaf,
    Node,
    beame_bound,
    beame_hypothesis,
    dnf_width,
    dt_depth_v,
    dt_depth_v_exhaustive,
    optimal_tree,
    switching_tail,
    tree_table,
    vertex_height,
)
from paraac_lab.graphs import all_pairs, pairs_mask
from paraac_lab.restrictions import EdgeFunction, Restriction, restrict_function
from paraac_lab.rng import RngStream

THREE_EDGE_LAYOUTS = [
    ((1, 2), (1, 3), (2, 3)),  # triangle
    ((1, 2), (1, 3), (1, 4)),  # star
    ((1, 2), (2, 3), (3, 4)),  # path
    ((1, 2), (3, 4), (1, 3)),
]


@st.composite
def edge_functions(draw, max_vars=6, n=5):
    edges = draw(st.lists(st.sampled_from(all_pairs(n)), min_size=0, max_size=max_vars, unique=True))
    table = draw(st.integers(0, (1 << (1 << len(edges))) - 1))
    return EdgeFunction(tuple(sorted(edges)), table)


def test_vertex_height_examples():
    assert vertex_height(Leaf(1)) == 0
    assert vertex_height(Node((1, 2), Leaf(0), Leaf(1))) == 2
    t = Node((1, 2), Leaf(0), Node((1, 3), Leaf(0), Leaf(1)))
    assert vertex_height(t) == 3
    # a vertex met twice on one path is charged once
    t = Node((1, 2), Node((1, 3), Leaf(0), Leaf(1)), Node((2, 3), Leaf(0), Leaf(1)))
    assert vertex_height(t) == 3


def test_dt_depth_examples():
    assert dt_depth_v(EdgeFunction.constant(1, [(1, 2), (3, 4)])) == 0
    assert dt_depth_v(EdgeFunction.constant(0)) == 0
    assert dt_depth_v(EdgeFunction.literal(1, 2)) == 2
    and2 = EdgeFunction(((1, 2), (1, 3)), 0b1000)
    assert dt_depth_v(and2) == 3
    assert dt_depth_v_exhaustive(and2) == 3
    # disjoint edges cost 4 vertices
    assert dt_depth_v(EdgeFunction(((1, 2), (3, 4)), 0b1000)) == 4


@pytest.mark.parametrize("edges", THREE_EDGE_LAYOUTS)
def test_dp_matches_tree_enumeration(edges):
    for table in range(256):
        f = EdgeFunction(edges, table)
        assert dt_depth_v(f) == dt_depth_v_exhaustive(f), table


@given(edge_functions())
@settings(max_examples=200, deadline=None)
def test_optimal_tree_is_optimal_and_correct(f):
    t = optimal_tree(f)
    assert tree_table(t, f.edges) == f.table
    assert vertex_height(t) == dt_depth_v(f)
    assert dt_depth_v(f) <= 2 * len(f.support())


@given(edge_functions(max_vars=6, n=5), st.data())
@settings(max_examples=150, deadline=None)
def test_restriction_never_increases_depth(f, data):
    star = data.draw(st.sets(st.integers(1, 5)))
    # fixed part drawn uniformly over non-starred edges of [5]
    ones = data.draw(st.integers(0, (1 << 10) - 1))
    mu = Restriction(5, tuple(star), ones & ~pairs_mask(star, 5))
    if math.comb(len(star), 2) > 10:
        return
    assert dt_depth_v(restrict_function(f, mu)) <= dt_depth_v(f)


def test_dt_depth_respects_cap():
    edges = tuple(all_pairs(6))[:11]
    with pytest.raises(ValueError):
        dt_depth_v(EdgeFunction(edges, 1))


def test_beame_bound_values():
    # ((2/q)^((s+r-1)/2) p r)^s * 8/3 at q = 1/2, r = 2, s = 1 is 64p/3
    assert beame_bound(0.5, 1 / 32, 2, 1) == pytest.approx(2 / 3)
    assert beame_bound(0.25, 4 / 12, 3, 2) == pytest.approx(8 * (8**2 * (1 / 3) * 3) ** 2 / 3)
    assert beame_bound(0.5, 0.1, 3, 0) == pytest.approx(8 / 3)
    assert beame_hypothesis(0.5, 1 / 16, 2, 1)
    assert not beame_hypothesis(0.5, 1 / 15, 2, 1)
    assert beame_hypothesis(0.5, 1.0, 0, 3)


def test_dnf_width():
    assert dnf_width(zoo_circuit("edge_probe", 6)) == 2
    assert dnf_width(zoo_circuit("triangle", 6)) == 3
    assert dnf_width(zoo_circuit("star", 6)) == 4
    assert dnf_width(zoo_circuit("const", 6)) == 0
    b = CircuitBuilder(4)
    c = b.build(b.not_(b.or_([b.input(1, 2), b.input(3, 4)])))
    # not DNF-shaped: falls back to the minterm DNF, one term over both edges
    assert dnf_width(c) == 4
    assert dnf_width(EdgeFunction.literal(2, 3)) == 2


def test_switching_tail_trivial_cases():
    res = switching_tail(8, 3, 0.5, zoo_circuit("const", 8), 0, 200, RngStream(1))
    assert res.empirical_tail == 0 and res.r == 0
    # vertex height can never exceed the star block size
    res = switching_tail(8, 3, 0.5, zoo_circuit("triangle", 8), 6, 200, RngStream(1))
    assert res.empirical_tail == 0
    with pytest.raises(ValueError):
        switching_tail(8, 3, 0.6, zoo_circuit("triangle", 8), 1, 10, RngStream(1))
    with pytest.raises(ValueError):
        switching_tail(8, 6, 0.5, zoo_circuit("triangle", 8), 1, 10, RngStream(1))


def test_switching_tail_reproducible_and_reported():
    f = zoo_circuit("triangle", 12)
    a = switching_tail(12, 4, 0.25, f, 2, 300, RngStream(9))
    b = switching_tail(12, 4, 0.25, f, 2, 300, RngStream(9))
    assert a == b
    assert a.r == 3 and a.beame_bound > 1 and not a.informative and a.consistent
    assert 0 < a.empirical_tail < 1
    assert len(a.csv_row()) == 12


def test_switching_tail_matches_exact_probability():
    # edge probe with ell = 2: depth exceeds 1 only when U = {1, 2}
    n = 6
    res = switching_tail(n, 2, 0.5, zoo_circuit("edge_probe", n), 1, 4000, RngStream(3))
    exact = 1 / math.comb(n, 2)
    assert res.wilson_lo <= exact <= res.wilson_hi
