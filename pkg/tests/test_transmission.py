import pytest

from twicemarked import transmission, zperm
from twicemarked.assembly import ChainSpec, build_chain
from twicemarked.chipfire import enumerate_picard, rank
from twicemarked.graph import Divisor, Graph, MarkedGraph, canonical_divisor, marked_cycle, path_graph
from twicemarked.transmission import (
    TransmissionError,
    certify_k_general_transmission,
    delta,
    tau_by_min_formula,
    transmission_permutation,
    transmission_table,
)
from twicemarked.zperm import Periodic, s_function, simple_reflection


def test_delta_on_tree(path4):
    # tree ranks are max(deg, -1), so delta is 1 exactly in degree 0
    g = path4.graph
    for a in range(-5, 4):
        d = g.point(1, 2).twist(path4.v, a, path4.w, 0)
        assert delta(path4, d) == (1 if d.degree == 0 else 0)


def test_delta_genus_one(c7):
    g = c7.graph
    # deg 0: delta is 1 exactly on the principal class
    assert delta(c7, g.zero_divisor()) == 1
    assert delta(c7, g.point(2) - g.point(3)) == 0
    # deg 1: delta is 1 exactly off the classes of v and w
    assert delta(c7, g.point(3)) == 1
    assert delta(c7, g.point(c7.w)) == 0
    assert delta(c7, g.point(c7.v)) == 0


def test_sigma_zero_on_seven_cycle(c7):
    rep = transmission_permutation(c7, c7.graph.point(c7.w))
    assert rep.submodular
    assert rep.tau == simple_reflection(7, 0)


def test_seven_cycle_panel(c7):
    g = c7.graph
    d = g.point(c7.v, 2) + g.point(c7.w + 2)
    tau = transmission_permutation(c7, d).tau
    assert tau == zperm.compose(zperm.shift(2), simple_reflection(7, 2))


def test_three_cycle_two_v(c3):
    tau = transmission_permutation(c3, c3.graph.point(c3.v, 2)).tau
    assert tau == Periodic(3, [-2, 0, 2])
    assert tau == zperm.compose(zperm.shift(1), simple_reflection(3, -1))


def test_path_zero_is_identity(path4):
    tau = transmission_permutation(path4, path4.graph.zero_divisor()).tau
    assert tau == zperm.identity()


def test_min_formula_agrees(chain33):
    for d in enumerate_picard(chain33.graph, 3, chain33.w)[:10]:
        tau = transmission_permutation(chain33, d).tau
        for b in range(-3, 6):
            assert tau_by_min_formula(chain33, d, b) == tau(b)


def test_table_matches_s_function(c7):
    g = c7.graph
    for d in enumerate_picard(g, 2, c7.w):
        table = transmission_table(c7, d)
        tau = transmission_permutation(c7, d).tau
        assert table.s.agrees_with(s_function(tau))


def test_table_three_cycle_entry(c3):
    table = transmission_table(c3, c3.graph.point(c3.w))
    assert table(1, 1) == 1


def test_table_on_tree(path4):
    table = transmission_table(path4, path4.graph.zero_divisor())
    for b in range(-2, 3):
        for a in range(b - 4, b + 5):
            assert table(a, b) == max(0, a - b)


def test_shift_covariance(c7):
    g = c7.graph
    d = g.point(3) + g.point(5)
    base = transmission_table(c7, d, (-2, 9))
    plus_v = transmission_table(c7, d + g.point(c7.v), (-2, 8))
    minus_w = transmission_table(c7, d - g.point(c7.w), (-2, 8))
    for b in range(-2, 8):
        for a in range(b - 5, b + 5):
            assert plus_v(a, b) == base(a + 1, b)
            assert minus_w(a, b) == base(a, b + 1)


def test_periodicity(c7):
    g = c7.graph
    table = transmission_table(c7, g.point(4), (0, 14))
    for b in range(7):
        for a in range(b - 3, b + 4):
            assert table(a + 7, b + 7) == table(a, b)


def test_defining_equations_counted(c7):
    before = dict(transmission.verification_stats)
    transmission_permutation(c7, c7.graph.point(2))
    after = transmission.verification_stats
    assert after["taus"] == before["taus"] + 1
    assert after["eq1_checks"] > before["eq1_checks"]
    assert after["eq2_checks"] > before["eq2_checks"]


def test_non_submodular_witness():
    # triangular prism marked along a triangle edge: D = 0 already fails
    g = Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
    mg = MarkedGraph(g, 0, 1)
    d = g.zero_divisor()
    rep = transmission_permutation(mg, d)
    assert not rep.submodular and rep.tau is None
    a, b = rep.witness
    assert delta(mg, d.twist(mg.v, a, mg.w, b)) == rep.witness_delta < 0
    assert rep.to_json()["witness"] == {"a": a, "b": b, "delta": rep.witness_delta}


def test_certify_cycle(c7):
    report = certify_k_general_transmission(c7)
    assert report.violations == []
    assert (report.passed, report.k, report.max_inv_k, report.classes) == (True, 7, 1, 7)


def test_certify_two_loop_chain():
    mg = build_chain(ChainSpec.uniform(3, 2))
    report = certify_k_general_transmission(mg, dump=True)
    assert report.passed and report.k == 3 and report.max_inv_k == 2 and report.classes == 9
    assert len(report.permutations) == 9


def test_certify_parallel_matches_serial():
    mg = build_chain(ChainSpec.uniform(2, 2))
    serial = certify_k_general_transmission(mg, dump=True)
    parallel = certify_k_general_transmission(mg, dump=True, workers=2)
    assert serial.to_json() == parallel.to_json()


def test_certify_rejects_equivalent_marks(path4):
    with pytest.raises(TransmissionError):
        certify_k_general_transmission(path4)


def test_certify_subdivided_edge():
    mg = MarkedGraph(path_graph(5), 0, 4)
    with pytest.raises(TransmissionError):
        certify_k_general_transmission(mg)
    # every tau on a tree is a shift
    for deg in range(-1, 3):
        d = mg.graph.point(2, deg) if deg >= 0 else -mg.graph.point(2)
        assert transmission_permutation(mg, d).tau.is_shift()


def test_large_k_surrogate():
    report = certify_k_general_transmission(marked_cycle(1, 6), large_k_surrogate=True)
    assert report.surrogate_window_ok is True


def test_dual_equation_direct(c3):
    g = c3.graph
    d = g.point(1) + g.point(2)
    tau = transmission_permutation(c3, d).tau
    K = canonical_divisor(g)
    for b in range(-2, 4):
        for a in range(b - 4, b + 4):
            lhs = rank(g, (K - d).twist(c3.v, -a, c3.w, -b)) + 1
            assert lhs == zperm.count_above_before(tau, a, b)
