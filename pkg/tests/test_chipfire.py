import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twicemarked import chipfire
from twicemarked.chipfire import (
    ResourceLimitError,
    enumerate_picard,
    has_effective_representative,
    is_equivalent,
    is_reduced,
    rank,
    rank_bruteforce,
    reduce,
    torsion_order,
)
from twicemarked.graph import (
    Divisor,
    Graph,
    MarkedGraph,
    canonical_divisor,
    cycle_graph,
    marked_cycle,
    path_graph,
    spanning_tree_count,
)

GRAPHS = [
    path_graph(3),
    cycle_graph(2),
    cycle_graph(4),
    Graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)]),
    Graph(3, [(0, 1, 2), (1, 2), (0, 2)]),
    Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]),
]


def divisors(g, lo=-2, hi=3):
    return st.lists(st.integers(lo, hi), min_size=g.n, max_size=g.n).map(Divisor)


@st.composite
def graph_and_divisor(draw):
    g = draw(st.sampled_from(GRAPHS))
    # keep D and K - D under the rank degree cap
    return g, draw(divisors(g).filter(lambda d: -4 <= d.degree <= 6))


@settings(max_examples=200, deadline=None)
@given(graph_and_divisor(), st.integers(0, 4))
def test_reduce_is_reduced_and_equivalent(gd, q):
    g, d = gd
    q %= g.n
    red = reduce(g, d, q)
    assert is_reduced(g, red, q)
    assert is_equivalent(g, red, d)
    assert reduce(g, red, q) == red


@settings(max_examples=200, deadline=None)
@given(graph_and_divisor())
def test_riemann_roch(gd):
    g, d = gd
    K = canonical_divisor(g)
    assert rank(g, d) - rank(g, K - d) == d.degree - g.genus + 1


@settings(max_examples=150, deadline=None)
@given(graph_and_divisor(), st.integers(0, 5))
def test_rank_monotone(gd, u):
    g, d = gd
    e = d + g.point(u % g.n)
    assert rank(g, d) <= rank(g, e) <= rank(g, d) + 1


@settings(max_examples=150, deadline=None)
@given(graph_and_divisor())
def test_rank_matches_bruteforce(gd):
    g, d = gd
    assert rank(g, d) == rank_bruteforce(g, d)


def test_effective_reduced_means_effective_class():
    g = cycle_graph(4)
    d = Divisor([2, -1, 0, 0])
    assert has_effective_representative(g, d)
    assert not has_effective_representative(g, Divisor([1, -1, 1, -1]) + Divisor([0, 0, -1, 0]))


def test_known_ranks():
    g = cycle_graph(5)
    assert rank(g, g.point(0, 3)) == 2
    assert rank(g, g.point(0) + g.point(2)) == 1
    assert rank(g, g.point(0) - g.point(1)) == -1
    k4 = GRAPHS[3]
    # K4 has genus 3 and is hyperelliptic-free: a degree-2 divisor has rank 0
    assert rank(k4, k4.point(0) + k4.point(1)) == 0
    assert rank(k4, canonical_divisor(k4)) == 2


def test_torsion_orders():
    assert torsion_order(marked_cycle(1, 6)) == 7
    assert torsion_order(marked_cycle(2, 4)) == 3
    assert torsion_order(marked_cycle(1, 1)) == 2
    assert torsion_order(MarkedGraph(path_graph(4), 0, 3)) == 1


@pytest.mark.parametrize("g", GRAPHS, ids=lambda g: f"n{g.n}g{g.genus}")
@pytest.mark.parametrize("degree", [-1, 0, 2])
def test_picard_counts(g, degree):
    classes = enumerate_picard(g, degree)
    assert len(classes) == spanning_tree_count(g)
    for a, b in itertools.combinations(classes, 2):
        assert not is_equivalent(g, a, b)
    assert all(d.degree == degree for d in classes)


def test_picard_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_picard(GRAPHS[3], 0, cap=5)


def test_degree_cap(monkeypatch):
    monkeypatch.setattr(chipfire, "RANK_DEGREE_CAP", 3)
    with pytest.raises(ResourceLimitError):
        rank(cycle_graph(3), Divisor([4, 0, 0]))
