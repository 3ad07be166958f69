import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paraac_lab.graphs import Graph, num_pairs
from paraac_lab.random_models import (
    bridge_probability,
    planted_edge_marginal,
    sample_er,
    sample_er_vector,
    sample_planted,
)
from paraac_lab.rng import RngStream, random_subset
from paraac_lab.stats import Z99, wilson_interval


def test_er_extremes():
    for n in (1, 2, 7):
        assert sample_er(n, 0.0, RngStream(3)) == Graph.empty(n)
        assert sample_er(n, 1.0, RngStream(3)) == Graph.complete(n)
    with pytest.raises(ValueError):
        sample_er(5, 1.5, RngStream(3))


def test_planted_extremes():
    s = sample_planted(9, 0.3, 0, RngStream(5))
    assert s.planted_graph == s.base and s.planted_set == ()
    s = sample_planted(9, 0.3, 9, RngStream(5))
    assert s.planted_graph == Graph.complete(9)
    with pytest.raises(ValueError):
        sample_planted(4, 0.3, 5, RngStream(5))


def test_planted_graph_is_base_plus_clique():
    for i in range(20):
        s = sample_planted(12, 0.2, 5, RngStream(11, i))
        assert s.planted_graph.is_clique(s.planted_set)
        assert s.planted_graph.bits & s.base.bits == s.base.bits
        extra = s.planted_graph.bits & ~s.base.bits
        for e in Graph(12, extra).edges():
            assert set(e) <= set(s.planted_set)


def test_streams_are_reproducible_and_frozen():
    # golden values pin the generator contract (PCG64 + SeedSequence, uniform draws only)
    assert sample_er(10, 0.5, RngStream(1)).bits == 13746657881946
    assert random_subset(RngStream(1).generator(), 10, 4) == [3, 6, 7, 8]
    assert RngStream(1, 3).generator().random() == 0.1141246529720964
    assert RngStream(1).child(3).generator().random() == 0.9229398824656557
    a = sample_planted(20, 0.4, 6, RngStream(99, 4))
    b = sample_planted(20, 0.4, 6, RngStream(99, 4))
    assert a == b
    assert sample_er(20, 0.4, RngStream(99, 5)) != sample_er(20, 0.4, RngStream(99, 4))


def test_rng_rejects_bad_seeds():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(1 << 64)
    with pytest.raises(ValueError):
        RngStream(1, -2)


def test_random_subset_uniform():
    # every 2-subset of [5] should appear about 1/10 of the time
    counts = {}
    trials = 20000
    gen = RngStream(2024).generator()
    for _ in range(trials):
        key = tuple(random_subset(gen, 5, 2))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 10
    for c in counts.values():
        lo, hi = wilson_interval(c, trials, z=4.0)
        assert lo <= 0.1 <= hi


@given(st.integers(0, 30), st.data())
def test_random_subset_shape(n, data):
    k = data.draw(st.integers(0, n))
    seed = data.draw(st.integers(0, 2**64 - 1))
    s = random_subset(RngStream(seed).generator(), n, k)
    assert len(s) == k == len(set(s)) and s == sorted(s)
    assert all(1 <= v <= n for v in s)


def test_bridge_probability_examples():
    assert bridge_probability(16, 3, 3) == 0.0
    assert bridge_probability(16, 2, 4) == pytest.approx(1 / 3, abs=1e-15)
    p = bridge_probability(16, 2, 4)
    assert p + (1 - p) / 4 == pytest.approx(0.5)
    for bad in [(1, 2, 3), (16, 0, 1), (16, 3, 2)]:
        with pytest.raises(ValueError):
            bridge_probability(*bad)


@given(st.integers(2, 10**6), st.floats(0.5, 20), st.floats(0, 20))
def test_bridge_identity(n, k, extra):
    kp = k + extra
    p = bridge_probability(n, k, kp)
    assert 0 <= p <= 1
    assert p + (1 - p) * n ** (-1 / k) == pytest.approx(n ** (-1 / kp), rel=1e-9, abs=1e-12)


def test_union_of_er_graphs_has_target_density():
    n, k, kp = 40, 2.0, 3.0
    p = bridge_probability(n, k, kp)
    target = n ** (-1 / kp)
    m = num_pairs(n)
    hits = 0
    trials = 400
    for t in range(trials):
        gen_h = RngStream(8, t, (0,)).generator()
        gen_g = RngStream(8, t, (1,)).generator()
        hits += int((sample_er_vector(n, p, gen_h) | sample_er_vector(n, n ** (-1 / k), gen_g)).sum())
    lo, hi = wilson_interval(hits, trials * m)
    assert lo <= target <= hi


def test_planted_edge_marginal():
    # exact value from the definition: Pr[{1,2} in G] + Pr[not in G] Pr[{1,2} inside A]
    n, p, c = 10, 0.3, 4
    inside = Fraction(math.comb(8, 2), math.comb(10, 4))
    assert planted_edge_marginal(n, p, c) == pytest.approx(p + (1 - p) * float(inside))
    assert planted_edge_marginal(n, p, 1) == p
    hits = 0
    trials = 20000
    for t in range(trials):
        hits += sample_planted(n, p, c, RngStream(17, t)).planted_graph.has_edge(1, 2)
    lo, hi = wilson_interval(hits, trials)
    assert lo <= planted_edge_marginal(n, p, c) <= hi


def test_wilson_interval_reference_values():
    assert Z99 == pytest.approx(2.5758293035489, abs=1e-12)
    # closed-form roots of (phat - x)^2 = z^2 x (1 - x) / N
    for s, n in [(0, 10), (5, 10), (97, 100), (10000, 10000)]:
        phat, z2 = s / n, Z99**2
        a = 1 + z2 / n
        b = -(2 * phat + z2 / n)
        c = phat * phat
        disc = math.sqrt(max(0.0, b * b - 4 * a * c))
        lo, hi = wilson_interval(s, n)
        assert lo == pytest.approx(max(0.0, (-b - disc) / (2 * a)), abs=1e-12)
        assert hi == pytest.approx(min(1.0, (-b + disc) / (2 * a)), abs=1e-12)
    assert wilson_interval(0, 0) == (0.0, 1.0)


@given(st.integers(1, 10**6), st.data())
def test_wilson_contains_point_estimate(n, data):
    s = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(s, n)
    assert 0 <= lo <= s / n <= hi <= 1


def test_er_vector_dtype():
    v = sample_er_vector(6, 0.5, np.random.default_rng(0))
    assert v.dtype == bool and v.shape == (15,)
