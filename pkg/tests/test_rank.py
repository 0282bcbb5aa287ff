import itertools
import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acx.poly import MultilinearPolynomial, SymmetricPolynomial, linear
from acx.rank import (MNV, NONUNIFORM, CoefficientHypergraph, RankCertificate, build_hypergraph,
                      exact_matching, greedy_matching, rank_certificate, upper_bound)
from oracles import brute_matching


def hg(n, edges):
    return CoefficientHypergraph(n, tuple(sorted(tuple(sorted(e)) for e in edges)))


@st.composite
def hypergraphs(draw, max_n=10, max_edges=15):
    n = draw(st.integers(1, max_n))
    edges = draw(st.sets(st.sets(st.integers(0, n - 1), min_size=1, max_size=3).map(
        lambda s: tuple(sorted(s))), max_size=max_edges))
    return hg(n, edges)


def test_build_hypergraph_threshold_filter():
    f = MultilinearPolynomial(4, {(0, 1): 1, (2, 3): 0.5})
    assert build_hypergraph(f, NONUNIFORM).edges == ((0, 1),)
    assert build_hypergraph(linear([1, 1, 1, 1])).edges == ((0,), (1,), (2,), (3,))


def test_mnv_mode_keeps_top_degree_only():
    f = MultilinearPolynomial(4, {(0,): 5, (1, 2): 1, (0, 3): -2})
    assert build_hypergraph(f, MNV).edges == ((0, 3), (1, 2))
    assert build_hypergraph(f, NONUNIFORM).edges == ((0,), (0, 3), (1, 2))


@pytest.mark.parametrize("n,d", [(6, 2), (7, 2), (7, 3), (9, 4)])
def test_full_degree_d_rank_is_floor_n_over_d(n, d):
    f = SymmetricPolynomial(n, [0] * d + [1])
    h = build_hypergraph(f, MNV)
    assert len(h.edges) == len(list(itertools.combinations(range(n), d)))
    cert = rank_certificate(f, MNV)
    assert cert.size == n // d


def test_greedy_examples():
    h = hg(4, [(0, 1), (1, 2), (2, 3)])
    assert greedy_matching(h).matching == ((0, 1), (2, 3))
    assert greedy_matching(hg(6, [(0, 1), (2, 3), (4, 5)])).size == 3
    assert greedy_matching(hg(3, [])).size == 0


def test_exact_examples():
    assert exact_matching(hg(4, [(0, 1), (1, 2), (2, 3)])).size == 2
    f = MultilinearPolynomial(6, {(0, 1): 1, (2, 3): 1, (4, 5): 1})
    assert rank_certificate(f).size == 3
    assert exact_matching(hg(4, [(0, 1), (0, 2), (0, 3)])).size == 1


def test_greedy_can_be_suboptimal():
    # greedy takes (0, 1) first and blocks both (0, 2) and (1, 3)
    h = hg(4, [(0, 1), (0, 2), (1, 3)])
    assert greedy_matching(h).size == 1
    assert exact_matching(h).size == 2
    assert not greedy_matching(h).exact


@given(hypergraphs())
def test_exact_agrees_with_brute_force(h):
    ex = exact_matching(h)
    assert ex.size == brute_matching(h.edges)
    assert ex.exact
    assert set(ex.matching) <= set(h.edges)


@given(hypergraphs())
def test_size_sandwich(h):
    g = greedy_matching(h)
    e = exact_matching(h)
    bound = min(h.n // min((len(x) for x in h.edges), default=1), len(h.edges))
    assert g.size <= e.size <= bound
    assert e.size <= upper_bound(h)
    if g.exact:
        assert g.size == e.size


@given(hypergraphs(), st.data())
def test_removing_matched_edge_drops_at_most_one(h, data):
    e = exact_matching(h)
    if not e.matching:
        return
    drop = data.draw(st.sampled_from(e.matching))
    smaller = CoefficientHypergraph(h.n, tuple(x for x in h.edges if x != drop))
    assert e.size - 1 <= exact_matching(smaller).size <= e.size


def test_certificate_rejects_overlap():
    with pytest.raises(ValueError):
        RankCertificate(((0, 1), (1, 2)), exact=False)


def test_cap_fallback_warns_and_marks_inexact(caplog):
    # 31 edges; greedy is stuck below the trivial bound so exact would be needed
    edges = [(0, i) for i in range(1, 32)]
    f = MultilinearPolynomial(33, {e: 1 for e in edges} | {(31, 32): 1})
    with caplog.at_level(logging.WARNING):
        cert = rank_certificate(f, exact=True, edge_cap=30)
    assert not cert.exact
    assert "greedy" in caplog.text


def test_many_singletons_greedy_is_fast():
    f = linear([1] * 100_000)
    cert = rank_certificate(f, exact=False)
    assert cert.size == 100_000 and cert.exact


def test_scaled_threshold():
    f = MultilinearPolynomial(4, {(0, 1): 0.25, (2, 3): 0.5})
    assert rank_certificate(f, threshold=0.25).size == 2
    assert rank_certificate(f, threshold=0.3).size == 1
    with pytest.raises(ValueError):
        build_hypergraph(f, threshold=0)
