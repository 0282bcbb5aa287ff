"""Exact laws of f(xi) for xi ~ Ber(p)^n, and queries on them."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .poly import MultilinearPolynomial, Polynomial, SymmetricPolynomial, as_symmetric, popcount

ENUM_CAP = 30
# above this many variables, separable inputs are convolved instead of enumerated
SPLIT_ABOVE = 20
DEFAULT_EPS = 1e-9
LOW_BITS = 20
# C(62, 31) < 2**63, so per-weight assignment counts fit in int64 up to here
COUNT_CAP = 62
DENSE_SPAN = 4_000_000


class CapExceeded(ValueError):
    """Raised when no exact path applies within the enumeration cap."""


def thread_count() -> int:
    env = os.environ.get("ACX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return p


def weight_probs(n: int, p: float) -> np.ndarray:
    """p^k (1-p)^(n-k) for k = 0..n."""
    k = np.arange(n + 1)
    return np.exp(k * math.log(p) + (n - k) * math.log1p(-p))


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finite law as sorted atoms.

    ``counts[a, k]`` (when present) is the number of assignments of weight k
    taking the value of atom a, so that the law is exactly
    ``sum_k counts[a, k] p^k (1-p)^(n-k)``. Counts are kept for
    integer-valued polynomials on at most 62 variables.
    """

    values: np.ndarray
    probs: np.ndarray
    eps: float = 0.0
    counts: Optional[np.ndarray] = None
    n: Optional[int] = None
    p: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def atoms(self) -> list[tuple]:
        return [(_scalar(v), float(q)) for v, q in zip(self.values, self.probs)]

    @property
    def integer_valued(self) -> bool:
        return self.values.dtype.kind in "iu"

    def total(self) -> float:
        return float(self.probs.sum())

    def exact_probabilities(self, p: Fraction) -> list[Fraction]:
        """Atom probabilities as exact rationals, from the weight counts."""
        if self.counts is None:
            raise ValueError("no weight counts recorded for this distribution")
        p = Fraction(p)
        w = [p**k * (1 - p) ** (self.n - k) for k in range(self.n + 1)]
        return [sum(int(c) * wk for c, wk in zip(row, w) if c) for row in self.counts]

    def same_atoms(self, other: DiscreteDistribution) -> bool:
        return (
            len(self) == len(other)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.probs, other.probs)
        )

    def to_rows(self) -> list[tuple]:
        return self.atoms

    def to_json(self) -> str:
        return json.dumps({"atoms": [{"value": v, "prob": q} for v, q in self.atoms]}, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "prob"])
        for v, q in self.atoms:
            w.writerow([repr(v), repr(q)])
        return buf.getvalue()


def _scalar(v):
    return int(v) if isinstance(v, np.integer) else float(v)


def _merge(values: np.ndarray, weights: np.ndarray, eps: float):
    """Sort and combine equal (or eps-close) values; weights may be 1-D or 2-D."""
    if len(values) == 0:
        return values, weights
    order = np.argsort(values, kind="stable")
    values = values[order]
    weights = weights[order]
    if eps > 0 and values.dtype.kind == "f":
        gaps = np.diff(values)
        scale = np.maximum(1.0, np.maximum(np.abs(values[:-1]), np.abs(values[1:])))
        new = np.concatenate(([True], gaps > eps * scale))
    else:
        new = np.concatenate(([True], values[1:] != values[:-1]))
    starts = np.flatnonzero(new)
    return values[starts], np.add.reduceat(weights, starts, axis=0)


def from_counts(values: np.ndarray, counts: np.ndarray, n: int, p: float, eps: float = 0.0, **meta):
    values, counts = _merge(values, counts, eps)
    keep = counts.any(axis=1)
    values, counts = values[keep], counts[keep]
    probs = counts.astype(np.float64) @ weight_probs(n, p)
    return DiscreteDistribution(values, probs, eps, counts, n, p, meta)


def from_atoms(values, probs, eps: float = 0.0, n=None, p=None, **meta) -> DiscreteDistribution:
    values = np.asarray(values)
    probs = np.asarray(probs, dtype=np.float64)
    values, probs = _merge(values, probs, eps)
    keep = probs > 0
    return DiscreteDistribution(values[keep], probs[keep], eps, None, n, p, meta)


# -- exact distribution ------------------------------------------------------


def exact_distribution(f: Polynomial, p: float, cap: int = ENUM_CAP, eps: Optional[float] = None,
                       threads: Optional[int] = None) -> DiscreteDistribution:
    """Exact law of f(xi), xi ~ Ber(p)^f.n.

    Paths, in order: the weight table when f is symmetric; full enumeration
    when f.n <= cap and f does not split (small f is always enumerated);
    otherwise convolution over variable-disjoint components, each of which
    must itself be symmetric or within the cap. Only enumeration keeps
    per-weight counts.
    """
    p = check_p(p)
    if eps is None:
        eps = 0.0 if f.is_integer else DEFAULT_EPS
    sym = as_symmetric(f)
    if sym is not None:
        return symmetric_distribution(sym, p, eps)
    pieces = None
    if f.n > SPLIT_ABOVE or f.n > cap:
        pieces = f.components()
    if f.n <= cap and (pieces is None or (len(pieces) == 1 and len(pieces[0][0]) == f.n)):
        return enumerate_distribution(f, p, eps, threads)
    dist = from_atoms(np.array([f.constant_coefficient]), [1.0], eps)
    for vars_, piece in _group_pieces(pieces):
        m = len(vars_)
        if piece.n == 1:
            sub = scaled_binomial(piece.terms[(0,)], m, p, eps)
        else:
            if piece.n > cap and as_symmetric(piece) is None:
                raise CapExceeded(
                    f"component on {piece.n} variables exceeds the enumeration cap {cap}; "
                    "use the Monte Carlo sampler")
            one = exact_distribution(piece, p, cap, eps, threads)
            sub = convolve_power(one, m)
        dist = convolve(dist, sub)
    return DiscreteDistribution(dist.values, dist.probs, eps, None, f.n, p, {"path": "components"})


def _group_pieces(pieces):
    """Group identical components; yields (list of copies, piece)."""
    groups: dict = {}
    for vars_, piece in pieces:
        key = (piece.n, tuple(piece.terms.items()))
        groups.setdefault(key, (piece, []))[1].append(vars_)
    for piece, copies in groups.values():
        yield copies, piece


def symmetric_distribution(f: SymmetricPolynomial, p: float, eps: float = 0.0) -> DiscreteDistribution:
    """Pr(f = v) = sum over k with g(k) = v of C(n,k) p^k (1-p)^(n-k)."""
    n = f.n
    table = f.weight_table()
    dtype = np.int64 if f.is_integer and all(abs(v) < 2**62 for v in table) else np.float64
    values = np.array(table, dtype=dtype)
    if n <= COUNT_CAP:
        counts = np.zeros((n + 1, n + 1), dtype=np.int64)
        counts[np.arange(n + 1), np.arange(n + 1)] = [math.comb(n, k) for k in range(n + 1)]
        dist = from_counts(values, counts, n, p, eps, path="symmetric")
        if dtype is not np.int64:
            dist = DiscreteDistribution(dist.values, dist.probs, eps, None, n, p, dist.meta)
        return dist
    pmf = stats.binom.pmf(np.arange(n + 1), n, p)
    d = from_atoms(values, pmf, eps, n, p, path="symmetric")
    return d


def scaled_binomial(a, m: int, p: float, eps: float = 0.0) -> DiscreteDistribution:
    """Law of a * Bin(m, p)."""
    k = np.arange(m + 1)
    values = a * k if isinstance(a, int) else float(a) * k.astype(np.float64)
    return from_atoms(values, stats.binom.pmf(k, m, p), eps, m, p)


def _zeta(a: np.ndarray, bits: int) -> None:
    """In place: a[S] <- sum over T subset of S of a[T]."""
    for i in range(bits):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]


def enumerate_distribution(f: Polynomial, p: float, eps: float = 0.0,
                           threads: Optional[int] = None) -> DiscreteDistribution:
    """Enumerate all 2^n assignments in chunks of 2^LOW_BITS via a subset-sum transform."""
    if isinstance(f, SymmetricPolynomial):
        f = f.expand()
    n = f.n
    low = min(n, LOW_BITS)
    high = n - low
    integer = f.is_integer
    dtype = np.int64 if integer else np.float64
    masks = f._masks if len(f) else np.zeros(0, dtype=np.uint64)
    coefs = f._coef_array if len(f) else np.zeros(0, dtype=dtype)
    low_mask = np.uint64((1 << low) - 1)
    t_low = (masks & low_mask).astype(np.intp)
    t_high = masks >> np.uint64(low)
    pc_low = popcount(np.arange(1 << low, dtype=np.uint64))
    wp = weight_probs(n, p)
    track_counts = integer and n <= COUNT_CAP

    def chunk(prefix: int):
        sel = (t_high & ~np.uint64(prefix)) == 0
        a = np.zeros(1 << low, dtype=dtype)
        np.add.at(a, t_low[sel], coefs[sel])
        _zeta(a, low)
        shift = int(prefix).bit_count()
        uniq, inv = np.unique(a, return_inverse=True)
        if track_counts:
            c = np.bincount(inv * (low + 1) + pc_low, minlength=len(uniq) * (low + 1))
            counts = np.zeros((len(uniq), n + 1), dtype=np.int64)
            counts[:, shift:shift + low + 1] = c.reshape(len(uniq), low + 1)
            return uniq, counts
        return uniq, np.bincount(inv, weights=wp[pc_low + shift], minlength=len(uniq))

    prefixes = range(1 << high)
    workers = threads or thread_count()
    if workers > 1 and high > 0:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk, prefixes))
    else:
        parts = [chunk(q) for q in prefixes]
    values = np.concatenate([v for v, _ in parts])
    weights = np.concatenate([w for _, w in parts])
    if track_counts:
        return from_counts(values, weights, n, p, eps, path="enumeration")
    return from_atoms(values, weights, eps, n, p, path="enumeration")


def convolve(a: DiscreteDistribution, b: DiscreteDistribution) -> DiscreteDistribution:
    """Law of X + Y for independent X ~ a, Y ~ b."""
    eps = max(a.eps, b.eps)
    if a.integer_valued and b.integer_valued:
        lo_a, lo_b = int(a.values[0]), int(b.values[0])
        span_a = int(a.values[-1]) - lo_a + 1
        span_b = int(b.values[-1]) - lo_b + 1
        if span_a + span_b <= DENSE_SPAN and min(span_a, span_b) * max(span_a, span_b) <= 5e8:
            da = np.zeros(span_a)
            da[a.values - lo_a] = a.probs
            db = np.zeros(span_b)
            db[b.values - lo_b] = b.probs
            dc = np.convolve(da, db)
            idx = np.flatnonzero(dc > 0)
            return DiscreteDistribution(idx.astype(np.int64) + lo_a + lo_b, dc[idx], eps)
    values = np.add.outer(a.values, b.values).ravel()
    probs = np.multiply.outer(a.probs, b.probs).ravel()
    return from_atoms(values, probs, eps)


def convolve_power(d: DiscreteDistribution, m: int) -> DiscreteDistribution:
    """Law of the sum of m independent copies of d."""
    result = DiscreteDistribution(np.zeros(1, dtype=d.values.dtype), np.ones(1), d.eps)
    base = d
    while m:
        if m & 1:
            result = convolve(result, base)
        m >>= 1
        if m:
            base = convolve(base, base)
    return result


def linear_distribution(coefs: Sequence, p: float, eps: Optional[float] = None) -> DiscreteDistribution:
    """Exact law of sum a_i xi_i by convolving one scaled binomial per distinct coefficient."""
    p = check_p(p)
    groups: dict = {}
    for a in coefs:
        if a != 0:
            groups[a] = groups.get(a, 0) + 1
    integer = all(float(a).is_integer() for a in groups)
    if eps is None:
        eps = 0.0 if integer else DEFAULT_EPS
    dist = from_atoms(np.array([0], dtype=np.int64 if integer else np.float64), [1.0], eps)
    for a in sorted(groups):
        dist = convolve(dist, scaled_binomial(int(a) if integer else a, groups[a], p, eps))
    return DiscreteDistribution(dist.values, dist.probs, eps, None, len(coefs), p, {"path": "linear"})


# -- queries ---------------------------------------------------------------


def _tol(dist: DiscreteDistribution, x: float) -> float:
    return dist.eps * max(1.0, abs(x)) if dist.eps else 0.0


def point_probability(dist: DiscreteDistribution, x: float, eps: float = 0.0) -> float:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    w = max(eps, _tol(dist, x))
    lo = np.searchsorted(dist.values, x - w, side="left")
    hi = np.searchsorted(dist.values, x + w, side="right")
    return float(dist.probs[lo:hi].sum())


def interval_probability(dist: DiscreteDistribution, lo: float, hi: float,
                         open_lo: bool = False, open_hi: bool = False) -> float:
    """Mass of [lo, hi], with either end optionally open."""
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    i = np.searchsorted(dist.values, lo, side="right" if open_lo else "left")
    j = np.searchsorted(dist.values, hi, side="left" if open_hi else "right")
    return float(dist.probs[i:j].sum()) if j > i else 0.0


def concentration_function(dist: DiscreteDistribution, t: float) -> tuple[float, float]:
    """Levy concentration Q(t) = sup_x Pr(x <= X <= x + t), with a maximising x.

    Some optimal window starts at an atom, so scanning atoms as left
    endpoints is exact.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    v = dist.values
    cum = np.concatenate(([0.0], np.cumsum(dist.probs)))
    ends = v.astype(np.float64) + t
    if dist.eps:
        ends = ends + dist.eps * np.maximum(1.0, np.abs(ends))
    j = np.searchsorted(v, ends, side="right")
    mass = cum[j] - cum[:-1]
    best = int(np.argmax(mass))
    return float(min(mass[best], 1.0)), _scalar(v[best])


def open_window_max(dist: DiscreteDistribution, s: float) -> tuple[float, float]:
    """sup_x Pr(|X - x| < s) for s > 0, with a maximising centre x."""
    if s <= 0:
        raise ValueError("s must be positive")
    v = dist.values
    cum = np.concatenate(([0.0], np.cumsum(dist.probs)))
    j = np.searchsorted(v, v.astype(np.float64) + 2 * s, side="left")
    mass = cum[j] - cum[:-1]
    best = int(np.argmax(mass))
    centre = (float(v[best]) + float(v[j[best] - 1])) / 2
    return float(min(mass[best], 1.0)), centre


def max_point_mass(dist: DiscreteDistribution, exclude: Optional[float] = None) -> tuple[float, Optional[float]]:
    """Largest atom probability, optionally ignoring the atom at ``exclude``."""
    probs = dist.probs
    if exclude is not None:
        probs = np.where(np.abs(dist.values - exclude) <= _tol(dist, exclude), 0.0, probs)
    if len(probs) == 0 or probs.max() <= 0:
        return 0.0, None
    i = int(np.argmax(probs))
    return float(probs[i]), _scalar(dist.values[i])


# -- reference laws ------------------------------------------------------------


def binomial_modal(n: int, p: float) -> float:
    """max_t C(n,t) p^t (1-p)^(n-t), evaluated at the mode floor((n+1)p) in log space."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = check_p(p)
    k = min(n, math.floor((n + 1) * p))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                    + k * math.log(p) + (n - k) * math.log1p(-p))


def binomial_mode(n: int, p: float) -> int:
    return min(n, math.floor((n + 1) * p))


def poisson_pmf_max(lam: float) -> float:
    """max_k e^-lam lam^k / k!; the mode is floor(lam) (tied with lam - 1 at integers)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    k = math.floor(lam)
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def binomial_window(n: int, p: float, delta: float) -> tuple[int, int]:
    """Smallest window [m - w, m + w] around the mode with Bin(n, p) mass >= 1 - delta."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    p = check_p(p)
    m = binomial_mode(n, p)
    pmf = stats.binom.pmf(np.arange(n + 1), n, p)
    for w in range(n + 1):
        lo, hi = max(0, m - w), min(n, m + w)
        if pmf[lo:hi + 1].sum() >= 1 - delta:
            return lo, hi
    return 0, n
