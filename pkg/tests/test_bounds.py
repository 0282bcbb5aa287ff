import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from acx import bounds as B
from acx import dist as D
from acx import graphs as G
from acx.poly import MultilinearPolynomial, SymmetricPolynomial, linear
from oracles import brute_distribution, brute_tau
from strategies import polynomials


# -- closed forms -------------------------------------------------------------------


def test_tau_examples():
    assert B.tau(0.5) == 0.5
    assert B.tau_argmax(0.5) in (1, 2)
    assert abs(B.tau(1e-4) - 1 / math.e) <= 1e-3


@given(st.floats(1e-3, 0.999))
def test_tau_matches_enumeration(p):
    assert B.tau(p) == pytest.approx(brute_tau(p), rel=1e-12)


def test_tau_envelope_examples():
    assert B.tau_envelope(0.5) == pytest.approx(1 / (math.e * math.log(2)), rel=1e-14)
    assert B.tau_envelope(0.5) == pytest.approx(0.530738, abs=1e-6)
    assert B.tau_envelope(1e-9) == pytest.approx(1 / math.e, rel=1e-8)


def test_tau_below_envelope_on_dense_grid():
    for p in np.linspace(1e-6, 1 - 1e-6, 10_000):
        assert B.tau(float(p)) <= B.tau_envelope(float(p)) * (1 + 1e-14)


@given(st.floats(0, 20))
def test_bessel_series_vs_quadrature(lam):
    series = B.bessel_I0(lam)
    assert abs(series - B.bessel_I0_quadrature(lam)) <= 1e-10 * series


def test_bessel_examples():
    assert B.bessel_I0(0) == 1
    assert B.bessel_I0(1) == pytest.approx(1.2660659, abs=1e-7)
    for lam in (0.5, 1, 5, 20, 50):
        assert B.bessel_I0(lam) == pytest.approx(float(special.i0(lam)), rel=1e-13)


# -- exact inequalities ---------------------------------------------------------------


@pytest.mark.parametrize("ell,n,p", [(1, 5, 0.3), (3, 12, 0.08), (2, 40, 0.025)])
def test_all_equal_linear_is_binomial_at_one(ell, n, p):
    f = linear([ell] * n)
    rep = B.check_nonneg_poisson(f, p)
    assert rep.verdict == B.HOLDS
    assert rep.lhs == pytest.approx(n * p * (1 - p) ** (n - 1), rel=1e-12)


def test_all_equal_linear_attains_tau_at_best_n():
    p = 0.05
    n = B.tau_argmax(p)
    rep = B.check_nonneg_poisson(linear([1] * n), p)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)
    assert rep.verdict == B.HOLDS


def test_single_product():
    rep = B.check_nonneg_poisson(MultilinearPolynomial(2, {(0, 1): 1}), 0.3)
    assert rep.lhs == pytest.approx(0.09, abs=1e-15) and rep.verdict == B.HOLDS


def test_nonneg_precondition_failures():
    f = SymmetricPolynomial(5, [0, 1, -1])
    assert B.check_nonneg_poisson(f, 0.2).verdict == B.INCONCLUSIVE
    g = MultilinearPolynomial(3, {(): 1, (0,): 1})
    assert B.check_nonneg_poisson(g, 0.2).verdict == B.INCONCLUSIVE
    signed_linear = linear([1, -2, 3])
    assert B.check_nonneg_poisson(signed_linear, 0.2).verdict == B.HOLDS


@given(polynomials(max_n=10, nonnegative=True, constant=False), st.floats(0.001, 0.999))
def test_nonneg_poisson_never_violated(f, p):
    rep = B.check_nonneg_poisson(f, p)
    assert rep.verdict != B.VIOLATED
    want = brute_distribution(f.terms, f.n, p)
    brute = max((q for v, q in want.items() if v != 0), default=0.0)
    assert rep.lhs == pytest.approx(brute, abs=1e-12)


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=10), st.floats(0.001, 0.999))
def test_signed_linear_never_violated(coefs, p):
    assert B.check_nonneg_poisson(linear(coefs), p).verdict != B.VIOLATED


def test_weak_bound_examples():
    for d in (1, 2, 3, 5):
        f = MultilinearPolynomial(d, {tuple(range(d)): 1})
        rep = B.check_weak_bound(f, 0.5)
        assert rep.lhs == pytest.approx(max(2.0**-d, 0.0) if d > 1 else 0.5)
        assert rep.rhs == 1 - 2.0**-d
        assert rep.verdict == B.HOLDS
    tight = B.check_weak_bound(linear([1]), 0.5)
    assert tight.lhs == tight.rhs == 0.5


def test_weak_bound_needs_small_p():
    assert B.check_weak_bound(linear([1, 1]), 0.6).verdict == B.INCONCLUSIVE


@given(polynomials(max_n=10), st.floats(0.001, 0.5))
def test_weak_bound_never_violated(f, p):
    if f.degree == 0:
        return
    assert B.check_weak_bound(f, p).verdict != B.VIOLATED


def test_random_sweeps_hold():
    for kind in ("nonneg-poisson", "weak-bound"):
        reps = B.random_sweep(kind, 60, 12, seed=3)
        assert len(reps) == 60
        assert all(r.verdict in (B.HOLDS, B.INCONCLUSIVE) for r in reps)
        assert sum(r.verdict == B.HOLDS for r in reps) >= 55


# -- trend checks ----------------------------------------------------------------------


def test_t12_linear_tightness():
    rep = B.check_t12(B.linear_sum_polynomial(400), 0.5, 0.4)
    assert abs(rep.lhs - D.binomial_modal(400, 0.5)) <= 1e-12
    assert rep.certificate["tight"]


@pytest.mark.parametrize("n,p", [(17, 0.3), (50, 0.5), (101, 0.72)])
def test_t12_tightness_any_s_below_half(n, p):
    for s in (0.1, 0.25, 0.49):
        rep = B.check_t12(SymmetricPolynomial(n, [0, 1]), p, s)
        assert rep.certificate["tight"]


def test_t12_delta_tail_matches_enumeration():
    f = MultilinearPolynomial(6, {(0, 1): 1, (2,): 2, (3, 4, 5): 1})
    tail = B.delta_tail(f, 0.4, 0.6)
    brute = 0.0
    for i in range(6):
        law = brute_distribution(f.derivative(i).terms, 6, 0.4)
        brute = max(brute, sum(q for v, q in law.items() if v <= 1.2))
    assert tail == pytest.approx(brute, abs=1e-12)
    sym = SymmetricPolynomial(8, [0, 1, 1])
    assert B.delta_tail(sym, 0.3, 1.0) == pytest.approx(B.delta_tail(sym.expand(), 0.3, 1.0), abs=1e-12)


def test_bessel_report_and_convergence():
    rep = B.check_bessel(1, 2000)
    assert abs(rep.certificate["pr_zero"] - B.bessel_bound(1)) <= 5e-3
    assert B.bessel_bound(1) == pytest.approx(0.46576, abs=1e-5)
    gaps = [abs(B.check_bessel(1, n).certificate["pr_zero"] - B.bessel_bound(1)) for n in (200, 2000, 20000)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_bessel_pm_split_matches_brute_force():
    n, lam = 10, 1.3
    rep = B.check_bessel(lam, n)
    law = brute_distribution(B.pm_split_polynomial(n).terms, n, lam / n)
    assert rep.certificate["pr_zero"] == pytest.approx(law[0], rel=1e-12)


def test_t11_matching_trend():
    consts = [B.check_t11(B.matching_polynomial(r, 2), 0.5).certificate["implied_constant"]
              for r in (8, 16, 32, 64)]
    assert max(consts) <= 2 * min(consts)


def test_t11_rank_and_mc_fallback():
    f = MultilinearPolynomial(40, {(i, i + 1, i + 2): 1 for i in range(0, 37, 2)})
    rep = B.check_t11(f, 0.5, samples=20_000, seed=1)
    assert rep.lhs_kind == "mc_ucl"
    assert rep.certificate["rank"] == 10 and rep.certificate["rank_exact"]
    assert rep.verdict != B.VIOLATED


def test_p14_clique_and_p15():
    g = G.complete_graph(30, 2)
    rep = B.check_p14(g, 5)
    assert rep.lhs_kind == "exact" and 0 < rep.lhs <= 1
    assert rep.certificate["implied_constant"] == pytest.approx(rep.lhs * math.sqrt(5))
    r15 = B.check_p15(G.sample_hypergraph(14, 3, 0.4, seed=2), 2)
    assert r15.theorem == "p1.5" and r15.verdict == B.HOLDS


def test_p14_precondition():
    assert B.check_p14(G.complete_graph(6), 4).verdict == B.INCONCLUSIVE


def test_graph_trend_reports_are_never_violations():
    r9 = B.check_t19(G.path_graph(3), 15, 0.5, trials=200, seed=1)
    r10 = B.check_t110(3, 15, 0.5, trials=200, seed=1)
    for r in (r9, r10):
        assert r.lhs_kind == "mc_ucl" and r.verdict != B.VIOLATED
        assert r.certificate["implied_constant"] > 0


def test_dispatch():
    rep = B.check_asymptotic("bessel", lam=2.0, n=100)
    assert rep.theorem == "bessel"
    with pytest.raises(ValueError):
        B.check_asymptotic("t9.9")


# -- extremal instances ---------------------------------------------------------------------


def test_extremal_catalog():
    cat = B.extremal_instances()
    assert set(cat) == {"matching", "power", "counterexample", "pm_split", "linear", "clique"}
    assert cat["matching"].build(2, 2) == MultilinearPolynomial(4, {(0, 1): 1, (2, 3): 1})
    ce = cat["counterexample"].build(3).expand()
    assert ce.terms == {(0,): 1, (1,): 1, (2,): 1, (0, 1): -1, (0, 2): -1, (1, 2): -1}
    sq = cat["power"].build(3, 2).expand()
    assert sq.terms == {(0,): 1, (1,): 1, (2,): 1, (0, 1): 2, (0, 2): 2, (1, 2): 2}


@pytest.mark.parametrize("n,d", [(4, 2), (4, 3), (5, 4), (3, 5)])
def test_power_polynomial_matches_direct_power(n, d):
    f = B.power_polynomial(n, d)
    for k in range(n + 1):
        x = [1] * k + [0] * (n - k)
        assert f(x) == k**d


def test_report_serialisation():
    rep = B.check_nonneg_poisson(linear([1, 1]), 0.3)
    d = rep.to_dict()
    assert d["margin"] == rep.rhs - rep.lhs
    text = B.reports_csv([rep])
    assert text.splitlines()[0] == ",".join(B.CSV_HEADER)
    assert B.reports_json([rep]) == B.reports_json([B.check_nonneg_poisson(linear([1, 1]), 0.3)])


def test_sweep_rows():
    rows = B.sweep_point_mass(B.pm_split_polynomial(12), [6, 12], [0.05, 0.2])
    assert [(r["n"], r["p"]) for r in rows] == [(6, 0.05), (6, 0.2), (12, 0.05), (12, 0.2)]
    for r in rows:
        law = brute_distribution(B.pm_split_polynomial(12).restrict(
            {i: 0 for i in range(r["n"], 12)}).terms, r["n"], r["p"])
        assert r["max_point_mass"] == pytest.approx(max(law.values()), rel=1e-12)
