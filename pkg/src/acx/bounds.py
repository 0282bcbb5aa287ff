"""Right-hand sides of the anti-concentration bounds and a harness that checks them.

Two kinds of checks live here. The non-asymptotic inequalities
(``Pr(f = l) <= tau(p)`` for nonnegative or linear f, and
``Pr(f = x) <= 1 - 2^-d`` for p <= 1/2) are hard pass/fail checks. The
asymptotic ones carry unspecified constants, so their reports expose the
implied constant ``lhs * normaliser`` instead of a verdict that could fail.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import dist as D
from .graphs import (GraphInstance, complete_graph, count_cliques, count_copies, edge_polynomial,
                     sample_gnp)
from .poly import MultilinearPolynomial, Polynomial, SymmetricPolynomial, as_symmetric, linear
from .rank import NONUNIFORM, rank_certificate
from .sampler import DEFAULT_LEVEL, mc_interval, wilson_interval

EXACT_TOL = 1e-12

HOLDS = "holds"
HOLDS_CI = "holds-within-CI"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

EXACT_THEOREMS = ("nonneg-poisson", "weak-bound", "p1.5")
ASYMPTOTIC_THEOREMS = ("t1.1", "t1.2", "p1.4", "p1.5", "t1.9", "t1.10", "bessel")


# -- closed forms ----------------------------------------------------------------


def _eta(n: int, p: float) -> float:
    return math.exp(math.log(n) + math.log(p) + (n - 1) * math.log1p(-p))


def tau(p: float) -> float:
    """sup over n >= 1 of n p (1-p)^(n-1), i.e. the largest Pr(Bin(n, p) = 1).

    The continuous maximiser is n* = -1/log(1-p); the integer supremum is at
    floor(n*) or ceil(n*) (or n = 1).
    """
    p = D.check_p(p)
    star = -1.0 / math.log1p(-p)
    cands = {1, max(1, math.floor(star)), max(1, math.ceil(star))}
    return max(_eta(n, p) for n in cands)


def tau_argmax(p: float) -> int:
    star = -1.0 / math.log1p(-D.check_p(p))
    cands = sorted({1, max(1, math.floor(star)), max(1, math.ceil(star))})
    return max(cands, key=lambda n: _eta(n, p))


def tau_envelope(p: float) -> float:
    """-p / (e (1-p) log(1-p)), an upper bound for tau(p) tending to 1/e as p -> 0."""
    p = D.check_p(p)
    return -p / (math.e * (1 - p) * math.log1p(-p))


def bessel_I0(lam: float) -> float:
    """Modified Bessel I_0 by its power series sum_i (lam/2)^(2i) / (i!)^2."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    q = (lam / 2) ** 2
    terms = [1.0]
    i = 0
    while True:
        i += 1
        t = terms[-1] * q / (i * i)
        terms.append(t)
        if i > lam and t < 1e-17 * terms[0] or t == 0.0:
            break
        if i > lam / 2 and t < 1e-17 * sum(terms):
            break
    return math.fsum(terms)


def bessel_I0_quadrature(lam: float, points: Optional[int] = None) -> float:
    """int_0^1 exp(lam cos(2 pi x)) dx by the trapezoidal rule.

    The integrand is smooth and periodic, so the rule converges geometrically.
    """
    m = points or max(64, int(4 * lam) + 64)
    x = np.arange(m) / m
    return float(math.fsum(np.exp(lam * np.cos(2 * np.pi * x))) / m)


def bessel_bound(lam: float) -> float:
    """e^-lam I_0(lam)."""
    return math.exp(-lam) * bessel_I0(lam)


# -- reports ------------------------------------------------------------------------


@dataclass
class BoundReport:
    theorem: str
    instance: str
    lhs: float
    lhs_kind: str  # "exact" or "mc_ucl"
    rhs: float
    verdict: str
    certificate: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        return d

    def csv_row(self) -> list:
        cert = ";".join(f"{k}={_short(v)}" for k, v in sorted(self.certificate.items()))
        return [self.theorem, self.instance, repr(self.lhs), self.lhs_kind, repr(self.rhs),
                repr(self.margin), self.verdict, cert]


CSV_HEADER = ["theorem", "instance", "lhs", "lhs_kind", "rhs", "margin", "verdict", "certificate"]


def _short(v):
    if isinstance(v, dict):
        return "{" + ",".join(f"{k}:{_short(x)}" for k, x in sorted(v.items())) + "}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_json(reports: Sequence[BoundReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=1)


def reports_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _exact_verdict(lhs: float, rhs: float) -> str:
    return VIOLATED if lhs > rhs + EXACT_TOL else HOLDS


def _asymptotic_verdict(lhs: float, rhs: float, kind: str, lcl: Optional[float] = None) -> str:
    if lhs <= rhs + EXACT_TOL:
        return HOLDS
    if kind == "mc_ucl" and lcl is not None and lcl <= rhs:
        return HOLDS_CI
    return INCONCLUSIVE


def _describe(f) -> str:
    if isinstance(f, SymmetricPolynomial):
        return f"symmetric(n={f.n}, size_coefs={list(f.size_coefs)})"
    return f"poly(n={f.n}, terms={len(f)}, d={f.degree})"


# -- exact inequalities --------------------------------------------------------------


def check_nonneg_poisson(f: Polynomial, p: float, instance: Optional[str] = None,
                         theorem: str = "nonneg-poisson") -> BoundReport:
    """max over l != 0 of Pr(f = l) against tau(p), for f with zero constant term that is
    linear or has nonnegative coefficients."""
    p = D.check_p(p)
    name = instance or _describe(f)
    if f.constant_coefficient != 0 or not (f.degree <= 1 or f.nonnegative):
        return BoundReport(theorem, name, math.nan, "exact", tau(p), INCONCLUSIVE,
                           {"reason": "needs zero constant term and degree 1 or nonnegative coefficients"})
    try:
        law = D.exact_distribution(f, p)
    except D.CapExceeded as exc:
        return BoundReport(theorem, name, math.nan, "exact", tau(p), INCONCLUSIVE, {"reason": str(exc)})
    lhs, at = D.max_point_mass(law, exclude=0)
    rhs = tau(p)
    return BoundReport(theorem, name, lhs, "exact", rhs, _exact_verdict(lhs, rhs),
                       {"argmax": at, "p": p, "envelope": tau_envelope(p), "one_over_e": 1 / math.e})


def check_weak_bound(f: Polynomial, p: float, instance: Optional[str] = None) -> BoundReport:
    """max over x != constant coefficient of Pr(f = x) against 1 - 2^-d, for p <= 1/2."""
    p = D.check_p(p)
    name = instance or _describe(f)
    d = f.degree
    rhs = 1 - 2.0 ** -d
    if p > 0.5:
        return BoundReport("weak-bound", name, math.nan, "exact", rhs, INCONCLUSIVE,
                           {"reason": "needs p <= 1/2"})
    try:
        law = D.exact_distribution(f, p)
    except D.CapExceeded as exc:
        return BoundReport("weak-bound", name, math.nan, "exact", rhs, INCONCLUSIVE, {"reason": str(exc)})
    lhs, at = D.max_point_mass(law, exclude=f.constant_coefficient)
    return BoundReport("weak-bound", name, lhs, "exact", rhs, _exact_verdict(lhs, rhs),
                       {"argmax": at, "p": p, "degree": d})


# -- asymptotic trend checks ------------------------------------------------------------


def _window_ucl(values: np.ndarray, half_width: float, open_ends: bool, level: float):
    """Select the densest window on the first half of ``values``, estimate it on the second.

    Returns (ucl, lcl, centre, estimate). Selection and estimation use
    disjoint samples so the interval is honest for the chosen window.
    """
    m = len(values) // 2
    pick, test = np.sort(values[:m]), values[m:]
    width = 2 * half_width
    side = "left" if open_ends else "right"
    j = np.searchsorted(pick, pick + width, side=side)
    best = int(np.argmax(j - np.arange(len(pick))))
    lo = pick[best]
    inside = (test >= lo) & ((test < lo + width) if open_ends else (test <= lo + width))
    hits = int(inside.sum())
    lcl, ucl = wilson_interval(hits, len(test), level)
    return ucl, lcl, float(lo + half_width), hits / len(test)


def check_t11(f: Polynomial, p: float, samples: int = 200_000, seed: int = 0,
              level: float = DEFAULT_LEVEL, instance: Optional[str] = None) -> BoundReport:
    """sup_x Pr(|f - x| < 1) against the 1/sqrt(r(f)) scale, for nonnegative f."""
    p = D.check_p(p)
    name = instance or _describe(f)
    if not f.nonnegative:
        return BoundReport("t1.1", name, math.nan, "exact", math.nan, INCONCLUSIVE,
                           {"reason": "needs nonnegative coefficients"})
    cert = rank_certificate(f, NONUNIFORM)
    r = cert.size
    if r == 0:
        return BoundReport("t1.1", name, math.nan, "exact", math.nan, INCONCLUSIVE, {"reason": "rank 0"})
    rhs = 1 / math.sqrt(r)
    payload = {"rank": r, "rank_exact": cert.exact, "normaliser": "sqrt(r)",
               "mnv_shape_log_r_over_sqrt_r": math.log(r) / math.sqrt(r) if r > 1 else math.nan}
    try:
        law = D.exact_distribution(f, p)
        lhs, centre = D.open_window_max(law, 1.0)
        payload.update(centre=centre, implied_constant=lhs * math.sqrt(r))
        return BoundReport("t1.1", name, lhs, "exact", rhs, _asymptotic_verdict(lhs, rhs, "exact"), payload)
    except D.CapExceeded:
        pass
    rng = np.random.Generator(np.random.Philox(seed))
    values = f.evaluate_rows(rng.random((samples, f.n)) < p).astype(np.float64)
    ucl, lcl, centre, est = _window_ucl(values, 1.0, True, level)
    payload.update(centre=centre, estimate=est, lcl=lcl, implied_constant=ucl * math.sqrt(r))
    return BoundReport("t1.1", name, ucl, "mc_ucl", rhs, _asymptotic_verdict(ucl, rhs, "mc_ucl", lcl), payload)


def _symmetric_delta_tail(f: SymmetricPolynomial, p: float, s: float) -> float:
    """Pr(Delta_i <= 2s); Delta_i = g(w + 1) - g(w) with w ~ Bin(n - 1, p)."""
    from scipy import stats
    n = f.n
    w = np.arange(n)
    g = np.array([float(v) for v in f.weight_table()])
    inc = g[1:] - g[:-1]
    pmf = stats.binom.pmf(w, n - 1, p)
    return float(pmf[inc <= 2 * s].sum())


def delta_tail(f: Polynomial, p: float, s: float, cap: int = 20) -> Optional[float]:
    """max_i Pr(Delta_i(xi) <= 2s) when computable exactly, else None."""
    sym = as_symmetric(f)
    if sym is not None:
        return _symmetric_delta_tail(sym, p, s) if sym.n else None
    if f.n > cap:
        return None
    worst = 0.0
    for i in range(f.n):
        law = D.exact_distribution(f.derivative(i), p)
        worst = max(worst, D.interval_probability(law, -math.inf, 2 * s))
    return worst


def check_t12(f: Polynomial, p: float, s: float, instance: Optional[str] = None) -> BoundReport:
    """sup_x Pr(|f - x| < s) against the modal binomial probability."""
    p = D.check_p(p)
    if s <= 0:
        raise ValueError("s must be positive")
    name = instance or _describe(f)
    rhs = D.binomial_modal(f.n, p)
    payload = {"s": s, "p": p, "n": f.n, "normaliser": "sqrt(n)", "delta_tail": delta_tail(f, p, s)}
    try:
        law = D.exact_distribution(f, p)
    except D.CapExceeded as exc:
        return BoundReport("t1.2", name, math.nan, "exact", rhs, INCONCLUSIVE, {**payload, "reason": str(exc)})
    lhs, centre = D.open_window_max(law, s)
    payload.update(centre=centre, implied_constant=lhs * math.sqrt(f.n), tight=abs(lhs - rhs) <= EXACT_TOL)
    return BoundReport("t1.2", name, lhs, "exact", rhs, _asymptotic_verdict(lhs, rhs, "exact"), payload)


def check_p14(g: GraphInstance, k: int, ell: Optional[float] = None, samples: int = 200_000,
              seed: int = 0, level: float = DEFAULT_LEVEL, instance: Optional[str] = None) -> BoundReport:
    """Pr(|X^Ber_{G,k} - l| <= k^(r-1)) against the 1/sqrt(k) scale (sup over l if l is None)."""
    name = instance or f"hypergraph(n={g.n}, r={g.r}, e={g.m}), k={k}"
    if not 0 < k <= g.n / 2:
        return BoundReport("p1.4", name, math.nan, "exact", math.nan, INCONCLUSIVE, {"reason": "needs n >= 2k > 0"})
    p = k / g.n
    half = float(k ** (g.r - 1))
    rhs = 1 / math.sqrt(k)
    poly = _edge_poly(g)
    payload = {"k": k, "r": g.r, "half_width": half, "normaliser": "sqrt(k)"}
    try:
        law = D.exact_distribution(poly, p)
        if ell is None:
            lhs, x = D.concentration_function(law, 2 * half)
            payload["ell"] = x + half
        else:
            lhs = D.interval_probability(law, ell - half, ell + half)
            payload["ell"] = ell
        payload["implied_constant"] = lhs * math.sqrt(k)
        return BoundReport("p1.4", name, lhs, "exact", rhs, _asymptotic_verdict(lhs, rhs, "exact"), payload)
    except D.CapExceeded:
        pass
    if ell is None:
        rng = np.random.Generator(np.random.Philox(seed))
        values = poly.evaluate_rows(rng.random((samples, g.n)) < p).astype(np.float64)
        ucl, lcl, centre, est = _window_ucl(values, half, False, level)
        payload.update(ell=centre, estimate=est)
    else:
        est_ = mc_interval(poly, p, ell - half, ell + half, samples=samples, seed=seed, level=level)
        ucl, lcl = est_.ci_hi, est_.ci_lo
        payload.update(ell=ell, estimate=est_.estimate)
    payload.update(lcl=lcl, implied_constant=ucl * math.sqrt(k))
    return BoundReport("p1.4", name, ucl, "mc_ucl", rhs, _asymptotic_verdict(ucl, rhs, "mc_ucl", lcl), payload)


def _edge_poly(g: GraphInstance) -> Polynomial:
    if g.m == math.comb(g.n, g.r):
        return SymmetricPolynomial(g.n, [0] * g.r + [1])
    return edge_polynomial(g)


def check_p15(g: GraphInstance, k: int, instance: Optional[str] = None) -> BoundReport:
    """max over l != 0 of Pr(X^Ber_{G,k} = l); the edge polynomial is nonnegative, so the
    exact bound tau(k/n) applies and 1/e is its limit."""
    name = instance or f"hypergraph(n={g.n}, r={g.r}, e={g.m}), k={k}"
    if not 0 < k < g.n:
        return BoundReport("p1.5", name, math.nan, "exact", math.nan, INCONCLUSIVE, {"reason": "needs 0 < k < n"})
    rep = check_nonneg_poisson(_edge_poly(g), k / g.n, name, theorem="p1.5")
    rep.certificate["k"] = k
    return rep


def _graph_stat_samples(stat: Callable[[GraphInstance], int], n: int, p: float, trials: int, seed: int) -> np.ndarray:
    seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    return np.array([stat(sample_gnp(n, p, int(s))) for s in seeds], dtype=np.float64)


def check_t19(H: GraphInstance, n: int, p: float, trials: int = 2000, seed: int = 0,
              level: float = DEFAULT_LEVEL) -> BoundReport:
    """sup_x Pr(|X_H - x| <= n^(h-2)) in G(n, p) against the 1/n scale (Monte Carlo)."""
    name = f"H(h={H.n}, e={H.m}) in G({n},{p})"
    if H.m == 0:
        return BoundReport("t1.9", name, math.nan, "mc_ucl", math.nan, INCONCLUSIVE, {"reason": "H needs an edge"})
    values = _graph_stat_samples(lambda G: count_copies(H, G), n, p, trials, seed)
    half = float(n ** (H.n - 2))
    ucl, lcl, centre, est = _window_ucl(values, half, False, level)
    rhs = 1 / n
    payload = {"half_width": half, "centre": centre, "estimate": est, "lcl": lcl, "trials": trials,
               "normaliser": "n", "implied_constant": ucl * n}
    return BoundReport("t1.9", name, ucl, "mc_ucl", rhs, _asymptotic_verdict(ucl, rhs, "mc_ucl", lcl), payload)


def check_t110(h: int, n: int, p: float, trials: int = 2000, seed: int = 0,
               level: float = DEFAULT_LEVEL) -> BoundReport:
    """max_x Pr(X_{K_h} = x) in G(n, p) against n^(1-h) (Monte Carlo)."""
    name = f"K_{h} in G({n},{p})"
    values = _graph_stat_samples(lambda G: count_cliques(G, h), n, p, trials, seed)
    ucl, lcl, centre, est = _window_ucl(values, 0.0, False, level)
    rhs = float(n) ** (1 - h)
    payload = {"value": centre, "estimate": est, "lcl": lcl, "trials": trials,
               "normaliser": f"n^{h - 1}", "implied_constant": ucl * n ** (h - 1)}
    return BoundReport("t1.10", name, ucl, "mc_ucl", rhs, _asymptotic_verdict(ucl, rhs, "mc_ucl", lcl), payload)


def check_bessel(lam: float, n: int, coefs: Optional[Sequence[int]] = None,
                 instance: Optional[str] = None) -> BoundReport:
    """max_x Pr(sum a_i xi_i = x) with p = lam/n against e^-lam I_0(lam).

    Defaults to the balanced +1/-1 coefficients, whose law is the difference
    of two independent binomials.
    """
    if lam <= 0 or n < 1 or lam >= n:
        raise ValueError("need 0 < lambda < n")
    if coefs is None:
        coefs = [1] * (n // 2) + [-1] * (n - n // 2)
        name = instance or f"pm_split(n={n}), lambda={lam}"
    else:
        name = instance or f"linear(n={len(coefs)}), lambda={lam}"
    law = D.linear_distribution(coefs, lam / n)
    lhs, at = D.max_point_mass(law)
    rhs = bessel_bound(lam)
    payload = {"lambda": lam, "n": n, "argmax": at, "pr_zero": D.point_probability(law, 0),
               "I0": bessel_I0(lam), "poisson_max": D.poisson_pmf_max(lam)}
    return BoundReport("bessel", name, lhs, "exact", rhs, _asymptotic_verdict(lhs, rhs, "exact"), payload)


def check_asymptotic(theorem: str, **kwargs) -> BoundReport:
    """Dispatch to the trend check for one of ``ASYMPTOTIC_THEOREMS``."""
    table = {"t1.1": check_t11, "t1.2": check_t12, "p1.4": check_p14, "p1.5": check_p15,
             "t1.9": check_t19, "t1.10": check_t110, "bessel": check_bessel}
    if theorem not in table:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {sorted(table)}")
    return table[theorem](**kwargs)


# -- extremal instances ---------------------------------------------------------------------


def matching_polynomial(r: int, d: int = 2) -> MultilinearPolynomial:
    """x_0...x_{d-1} + x_d...x_{2d-1} + ...: r disjoint degree-d monomials."""
    return MultilinearPolynomial(r * d, {tuple(range(i * d, (i + 1) * d)): 1 for i in range(r)})


def surjections(d: int, j: int) -> int:
    return sum((-1) ** i * math.comb(j, i) * (j - i) ** d for i in range(j + 1))


def power_polynomial(n: int, d: int) -> SymmetricPolynomial:
    """(x_0 + ... + x_{n-1})^d reduced with x^2 = x: a size-j monomial gets surj(d, j)."""
    return SymmetricPolynomial(n, [0] + [surjections(d, j) for j in range(1, d + 1)])


def counterexample_polynomial(n: int) -> SymmetricPolynomial:
    """sum x_i - sum_{i<j} x_i x_j."""
    return SymmetricPolynomial(n, [0, 1, -1])


def pm_split_polynomial(n: int) -> MultilinearPolynomial:
    return linear([1] * (n // 2) + [-1] * (n - n // 2))


def linear_sum_polynomial(n: int) -> SymmetricPolynomial:
    return SymmetricPolynomial(n, [0, 1])


@dataclass(frozen=True)
class Extremal:
    name: str
    theorem: str
    params: tuple
    build: Callable
    note: str


def extremal_instances() -> dict[str, Extremal]:
    return {
        "matching": Extremal("matching", "t1.1", ("r", "d"), matching_polynomial,
                             "r disjoint monomials; linearly many coefficients, rank r"),
        "power": Extremal("power", "t1.1", ("n", "d"), power_polynomial,
                          "(x_1+...+x_n)^d multilinearised; Theta(n^d) coefficients"),
        "counterexample": Extremal("counterexample", "poisson", ("n",), counterexample_polynomial,
                                   "Pr(X = 1) -> 3/(2e) at p = 1/n"),
        "pm_split": Extremal("pm_split", "bessel", ("n",), pm_split_polynomial,
                             "half +1, half -1 coefficients; sharp for e^-lam I_0(lam)"),
        "linear": Extremal("linear", "t1.2", ("n",), linear_sum_polynomial,
                           "x_1+...+x_n; the modal binomial term is attained"),
        "clique": Extremal("clique", "p1.4", ("n", "r"), complete_graph,
                           "complete r-uniform hypergraph; sqrt(k) scale is attained"),
    }


# -- random instances and sweeps --------------------------------------------------------------


def random_polynomial(rng: np.random.Generator, n: int, d: int, terms: int, nonnegative: bool = True,
                      max_coef: int = 3, constant: bool = False) -> MultilinearPolynomial:
    """Random integer-coefficient polynomial with ``terms`` monomials of size 1..d."""
    acc = {}
    for _ in range(terms):
        size = int(rng.integers(1, d + 1))
        mono = tuple(sorted(int(v) for v in rng.choice(n, size=min(size, n), replace=False)))
        coef = int(rng.integers(1, max_coef + 1))
        if not nonnegative and rng.random() < 0.5:
            coef = -coef
        acc[mono] = coef
    if constant:
        acc[()] = int(rng.integers(-max_coef, max_coef + 1))
    return MultilinearPolynomial(n, acc)


def random_sweep(kind: str, count: int, nmax: int, seed: int, dmax: int = 4,
                 pmax: Optional[float] = None) -> list[BoundReport]:
    """``count`` random exact checks of ``kind`` ("nonneg-poisson" or "weak-bound")."""
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for idx in range(count):
        n = int(rng.integers(1, nmax + 1))
        d = int(rng.integers(1, min(dmax, n) + 1))
        terms = int(rng.integers(1, 3 * n + 1))
        if kind == "nonneg-poisson":
            f = random_polynomial(rng, n, d, terms, nonnegative=bool(rng.random() < 0.8) or d == 1)
            if not f.nonnegative and f.degree > 1:
                f = MultilinearPolynomial(n, {m: abs(c) for m, c in f.terms.items()})
            p = float(rng.uniform(0.005, pmax or 0.995))
            out.append(check_nonneg_poisson(f, p, f"random#{idx}:{_describe(f)}"))
        elif kind == "weak-bound":
            f = random_polynomial(rng, n, d, terms, nonnegative=False, constant=bool(rng.random() < 0.5))
            p = float(rng.uniform(0.005, pmax or 0.5))
            out.append(check_weak_bound(f, p, f"random#{idx}:{_describe(f)}"))
        else:
            raise ValueError(f"no random sweep for {kind!r}")
    return out


def sweep_point_mass(f: Polynomial, ns: Sequence[int], ps: Sequence[float]) -> list[dict]:
    """Largest point probability of f restricted to its first n variables, over an (n, p) grid.

    Variables beyond n are fixed to 0. No bound is asserted; this maps the
    landscape for the intermediate regime between p = lambda/n and fixed p.
    """
    rows = []
    for n in ns:
        if not 0 <= n <= f.n:
            raise ValueError(f"n={n} outside [0, {f.n}]")
        sub = f.restrict({i: 0 for i in range(n, f.n)})
        for p in ps:
            q, at = D.max_point_mass(D.exact_distribution(sub, p))
            rows.append({"n": n, "p": p, "max_point_mass": q, "argmax": at,
                         "sqrt_np": math.sqrt(n * p), "modal_binomial": D.binomial_modal(n, p)})
    return rows
