"""Monte Carlo estimates of point and interval probabilities, and the bit-flip process."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Callable, Optional

import numpy as np

from .dist import binomial_window, check_p, enumerate_distribution, exact_distribution, thread_count
from .poly import MultilinearPolynomial, Polynomial, SymmetricPolynomial

CHUNK = 1 << 18
TABLE_BITS = 22
DEFAULT_LEVEL = 0.99


def wilson_interval(hits: int, samples: int, level: float = DEFAULT_LEVEL) -> tuple[float, float]:
    """Two-sided Wilson score interval for a binomial proportion."""
    if samples <= 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + level / 2)
    phat = hits / samples
    z2 = z * z
    denom = 1 + z2 / samples
    centre = (phat + z2 / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples + z2 / (4 * samples * samples)) / denom
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == samples else min(1.0, centre + half)
    return lo, hi


def hoeffding_halfwidth(samples: int, level: float = DEFAULT_LEVEL) -> float:
    return math.sqrt(math.log(2 / (1 - level)) / (2 * samples))


@dataclass(frozen=True)
class MCEstimate:
    hits: int
    samples: int
    estimate: float
    ci_lo: float
    ci_hi: float
    level: float
    seed: int
    hoeffding: float

    @classmethod
    def from_hits(cls, hits: int, samples: int, level: float, seed: int) -> MCEstimate:
        lo, hi = wilson_interval(hits, samples, level)
        est = hits / samples
        # keep the point estimate inside the interval despite rounding at the ends
        lo, hi = min(lo, est), max(hi, est)
        return cls(hits, samples, est, lo, hi, level, seed, hoeffding_halfwidth(samples, level))

    def covers(self, value: float) -> bool:
        return self.ci_lo <= value <= self.ci_hi

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def chunk_streams(seed: int, samples: int) -> list[tuple[np.random.SeedSequence, int]]:
    """Fixed split of the sample budget into independent Philox streams."""
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    return list(zip(seqs, sizes))


def _pack(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits, axis=1, bitorder="little")
    out = np.zeros((bits.shape[0], 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view(np.uint64).ravel()


def sample_bits(rng: np.random.Generator, n: int, p: float, size: int) -> np.ndarray:
    return rng.random((size, n)) < p


def _event_counter(f: Polynomial, p: float, event: Callable[[np.ndarray], np.ndarray]):
    """Return chunk -> hit count for the event {event(f(xi))}."""
    n = f.n
    if n <= TABLE_BITS and not isinstance(f, SymmetricPolynomial):
        table = event(_value_table(f))

        def count(rng, size):
            if p == 0.5:
                masks = rng.integers(0, 1 << n, size=size, dtype=np.int64) if n else np.zeros(size, np.int64)
            else:
                masks = _pack(sample_bits(rng, n, p, size)).astype(np.int64)
            return int(table[masks].sum())
        return count

    def count(rng, size):
        return int(event(f.evaluate_rows(sample_bits(rng, n, p, size))).sum())
    return count


def _value_table(f: MultilinearPolynomial) -> np.ndarray:
    from .dist import _zeta
    n = f.n
    a = np.zeros(1 << n, dtype=np.int64 if f.is_integer else np.float64)
    if len(f):
        np.add.at(a, f._masks.astype(np.intp), f._coef_array)
    _zeta(a, n)
    return a


def mc_event(f: Polynomial, p: float, event: Callable[[np.ndarray], np.ndarray], samples: int,
             seed: int = 0, level: float = DEFAULT_LEVEL, threads: Optional[int] = None) -> MCEstimate:
    """Estimate Pr(event(f(xi))) from ``samples`` draws; result is independent of thread count."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    p = check_p(p)
    count = _event_counter(f, p, event)

    def run(job):
        seq, size = job
        return count(np.random.Generator(np.random.Philox(seq)), size)

    jobs = chunk_streams(seed, samples)
    workers = threads or thread_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, jobs))
    else:
        hits = sum(run(j) for j in jobs)
    return MCEstimate.from_hits(hits, samples, level, seed)


def mc_point(f: Polynomial, p: float, x: float, eps: float = 0.0, samples: int = 100_000,
             seed: int = 0, level: float = DEFAULT_LEVEL, threads: Optional[int] = None) -> MCEstimate:
    """Estimate Pr(|f(xi) - x| <= eps)."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return mc_event(f, p, lambda v: np.abs(v - x) <= eps, samples, seed, level, threads)


def mc_interval(f: Polynomial, p: float, lo: float, hi: float, open_lo: bool = False,
                open_hi: bool = False, samples: int = 100_000, seed: int = 0,
                level: float = DEFAULT_LEVEL, threads: Optional[int] = None) -> MCEstimate:
    """Estimate Pr(f(xi) in [lo, hi]) with either end optionally open."""
    if lo > hi:
        raise ValueError("lo must not exceed hi")

    def event(v):
        left = v > lo if open_lo else v >= lo
        right = v < hi if open_hi else v <= hi
        return left & right
    return mc_event(f, p, event, samples, seed, level, threads)


# -- the random bit-flip process ----------------------------------------------


@dataclass(frozen=True)
class ErdosProcessTrace:
    """One run of the process that switches bits on in a uniformly random order.

    ``values[t]`` is f at the assignment whose ones are
    ``permutation[:t]``; Y counts t in ``window`` with |values[t] - x| < s.
    """

    permutation: tuple
    values: tuple
    window: tuple
    x: float
    s: float
    Y: int
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "flipped", "value"])
        w.writerow([0, "", repr(self.values[0])])
        for t, i in enumerate(self.permutation, start=1):
            w.writerow([t, i, repr(self.values[t])])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"permutation": list(self.permutation), "values": list(self.values),
                           "window": list(self.window), "x": self.x, "s": self.s, "Y": self.Y,
                           "seed": self.seed}, sort_keys=True)


def default_window(n: int, p: float, delta: Optional[float] = None) -> tuple[int, int]:
    if delta is None:
        delta = 1 / math.sqrt(n) if n > 1 else 0.5
    return binomial_window(n, p, delta)


def process_values(f: Polynomial, order) -> list:
    """f along the chain 0 = x^0 < x^1 < ... < x^n, each step adding one increment."""
    if isinstance(f, SymmetricPolynomial):
        return f.weight_table()
    terms = list(f.terms.items())
    by_var: list[list[int]] = [[] for _ in range(f.n)]
    for k, (mono, _) in enumerate(terms):
        for i in mono:
            by_var[i].append(k)
    missing = [len(mono) for mono, _ in terms]
    value = f.constant_coefficient
    values = [value]
    for i in order:
        for k in by_var[i]:
            missing[k] -= 1
            if missing[k] == 0:
                value += terms[k][1]
        values.append(value)
    return values


def erdos_process(f: Polynomial, p: float, x: float, s: float, delta: Optional[float] = None,
                  seed: int = 0, window: Optional[tuple[int, int]] = None) -> ErdosProcessTrace:
    if s <= 0:
        raise ValueError("s must be positive")
    p = check_p(p)
    n = f.n
    if window is None:
        window = default_window(n, p, delta)
    rng = np.random.Generator(np.random.Philox(seed))
    order = [int(i) for i in rng.permutation(n)]
    values = process_values(f, order)
    lo, hi = window
    y = sum(1 for t in range(lo, hi + 1) if abs(values[t] - x) < s)
    return ErdosProcessTrace(tuple(order), tuple(values), (lo, hi), x, s, y, seed)


def expected_Y(f: Polynomial, p: float, x: float, s: float, window: tuple[int, int]) -> float:
    """E[Y] exactly: sum over t in the window of the fraction of weight-t points near x."""
    dist = exact_distribution(f, p)
    if dist.counts is None:
        dist = enumerate_distribution(f.expand(), p)
    if dist.counts is None:
        raise ValueError("E[Y] needs weight counts; requires an integer polynomial on <= 62 variables")
    near = np.abs(dist.values - x) < s
    per_weight = dist.counts[near].sum(axis=0)
    lo, hi = window
    return float(sum(per_weight[t] / math.comb(f.n, t) for t in range(lo, hi + 1)))
