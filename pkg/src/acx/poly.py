"""Multilinear polynomials over {0,1}^n.

Two concrete representations share one interface:

* :class:`MultilinearPolynomial` keeps an explicit sparse term map.
* :class:`SymmetricPolynomial` keeps one coefficient per monomial size, which
  is enough to describe permutation-invariant polynomials such as
  ``sum(x_i) - sum_{i<j} x_i x_j`` at sizes where the term map would not fit
  in memory.
"""
from __future__ import annotations

import itertools
import json
import math
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Monomial = tuple  # sorted tuple of variable indices
Number = Union[int, float]

MASK_BITS = 64


def _as_number(c) -> Number:
    if isinstance(c, (bool, np.bool_)):
        return int(c)
    if isinstance(c, (int, np.integer)):
        return int(c)
    c = float(c)
    if not math.isfinite(c):
        raise ValueError(f"non-finite coefficient {c!r}")
    return c


def _integral(values: Iterable[Number]) -> bool:
    return all(isinstance(v, int) or float(v).is_integer() for v in values)


def _check_assignment(x, n: int) -> np.ndarray:
    bits = np.asarray(x)
    if bits.ndim != 1 or bits.shape[0] != n:
        raise ValueError(f"assignment has length {bits.shape[0] if bits.ndim else 0}, expected {n}")
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("assignment entries must be 0 or 1")
    return bits.astype(np.int64)


def _check_index(i: int, n: int) -> int:
    if not 0 <= i < n:
        raise IndexError(f"variable index {i} out of range for n={n}")
    return int(i)


class MultilinearPolynomial:
    """Sparse multilinear polynomial: a map from monomials to coefficients.

    ``terms`` may be a mapping or an iterable of ``(vars, coef)`` pairs.
    Repeated variables inside a monomial collapse (``x_i^2 = x_i`` on
    {0,1}), duplicate monomials are summed and zero coefficients dropped.
    When every coefficient is integral the polynomial is stored with Python
    ints, which keeps enumeration sums exact.
    """

    def __init__(self, n: int, terms: Union[Mapping, Iterable] = ()):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.n = int(n)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Number] = {}
        for vars_, coef in items:
            mono = tuple(sorted({int(v) for v in vars_}))
            if mono and (mono[0] < 0 or mono[-1] >= self.n):
                raise ValueError(f"monomial {mono} has an index outside [0, {self.n})")
            acc[mono] = acc.get(mono, 0) + _as_number(coef)
        if _integral(acc.values()):
            acc = {m: int(c) for m, c in acc.items()}
        self._terms = {m: c for m, c in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0])) if c != 0}

    # -- basic properties -------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @cached_property
    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    @property
    def constant_coefficient(self) -> Number:
        return self._terms.get((), 0)

    @cached_property
    def is_integer(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    @cached_property
    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self._terms.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, SymmetricPolynomial):
            other = other.expand()
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"MultilinearPolynomial(n={self.n}, 0)"
        parts = []
        for mono, c in self._terms.items():
            name = "*".join(f"x{i}" for i in mono) or "1"
            parts.append(f"{c}*{name}" if mono else f"{c}")
        return f"MultilinearPolynomial(n={self.n}, {' + '.join(parts)})"

    # -- array views ------------------------------------------------------

    @cached_property
    def _masks(self) -> np.ndarray:
        if self.n > MASK_BITS:
            raise ValueError("mask representation needs n <= 64")
        return np.array([sum(1 << i for i in m) for m in self._terms], dtype=np.uint64)

    @cached_property
    def _coef_array(self) -> np.ndarray:
        dtype = np.int64 if self.is_integer else np.float64
        return np.array(list(self._terms.values()), dtype=dtype)

    @cached_property
    def _terms_by_var(self) -> list[list[tuple[Monomial, Number]]]:
        by_var: list[list[tuple[Monomial, Number]]] = [[] for _ in range(self.n)]
        for mono, c in self._terms.items():
            for i in mono:
                by_var[i].append((mono, c))
        return by_var

    # -- evaluation -------------------------------------------------------

    def evaluate(self, x: Sequence[int]) -> Number:
        bits = _check_assignment(x, self.n)
        total = 0
        for mono, c in self._terms.items():
            if all(bits[i] for i in mono):
                total += c
        return total

    __call__ = evaluate

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at assignments packed as uint64 bitmasks."""
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros(masks.shape, dtype=self._coef_array.dtype)
        for tm, c in zip(self._masks, self._coef_array):
            if tm == 0:
                out += c
            else:
                out += c * ((masks & tm) == tm)
        return out

    def evaluate_rows(self, bits: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at the rows of a (samples, n) 0/1 matrix."""
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise ValueError(f"expected a (samples, {self.n}) matrix")
        out = np.zeros(bits.shape[0], dtype=self._coef_array.dtype)
        for mono, c in self._terms.items():
            if not mono:
                out += c
            elif len(mono) == 1:
                out += c * bits[:, mono[0]]
            else:
                out += c * np.all(bits[:, list(mono)], axis=1)
        return out

    def delta_increment(self, x: Sequence[int], i: int) -> Number:
        """f(x with bit i set) - f(x with bit i cleared)."""
        bits = _check_assignment(x, self.n)
        i = _check_index(i, self.n)
        total = 0
        for mono, c in self._terms_by_var[i]:
            if all(bits[j] for j in mono if j != i):
                total += c
        return total

    def derivative(self, i: int) -> MultilinearPolynomial:
        """The increment polynomial x -> delta_increment(x, i), in the same n variables."""
        i = _check_index(i, self.n)
        terms = {tuple(j for j in mono if j != i): c for mono, c in self._terms_by_var[i]}
        return MultilinearPolynomial(self.n, terms)

    # -- structural operations -------------------------------------------

    def restrict(self, fixed: Mapping[int, int]) -> MultilinearPolynomial:
        """Substitute 0/1 values for some variables; survivors are re-indexed densely."""
        for i, b in fixed.items():
            _check_index(i, self.n)
            if b not in (0, 1):
                raise ValueError("fixed values must be 0 or 1")
        free = [i for i in range(self.n) if i not in fixed]
        index = {v: k for k, v in enumerate(free)}
        acc: dict[Monomial, Number] = {}
        for mono, c in self._terms.items():
            if any(fixed.get(i) == 0 for i in mono):
                continue
            rest = tuple(index[i] for i in mono if i not in fixed)
            acc[rest] = acc.get(rest, 0) + c
        return MultilinearPolynomial(len(free), acc)

    def components(self) -> list[tuple[list[int], MultilinearPolynomial]]:
        """Split into variable-disjoint pieces.

        Returns ``(variables, piece)`` pairs whose pieces sum to ``f`` minus its
        constant coefficient; variables that occur in no term are omitted.
        """
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for mono in self._terms:
            for a, b in zip(mono, mono[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        used = sorted({i for mono in self._terms for i in mono})
        for i in used:
            groups.setdefault(find(i), []).append(i)
        out = []
        for root in sorted(groups):
            vars_ = groups[root]
            index = {v: k for k, v in enumerate(vars_)}
            sub = {tuple(index[i] for i in mono): c
                   for mono, c in self._terms.items() if mono and find(mono[0]) == root}
            out.append((vars_, MultilinearPolynomial(len(vars_), sub)))
        return out

    def permute(self, perm: Sequence[int]) -> MultilinearPolynomial:
        """Rename variable i to perm[i]."""
        return MultilinearPolynomial(self.n, {tuple(perm[i] for i in m): c for m, c in self._terms.items()})

    def expand(self) -> MultilinearPolynomial:
        return self

    def weight_table(self):
        return detect_symmetric(self)

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "terms": [{"vars": list(m), "coef": c} for m, c in self._terms.items()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class SymmetricPolynomial:
    """Permutation-invariant multilinear polynomial.

    ``size_coefs[j]`` is the common coefficient of every size-j monomial, so
    the polynomial is ``sum_j size_coefs[j] * e_j(x)`` with ``e_j`` the
    elementary symmetric polynomials. Its value at x depends only on the
    weight |x|: ``g(k) = sum_j size_coefs[j] * C(k, j)``.
    """

    def __init__(self, n: int, size_coefs: Sequence[Number]):
        if n < 0:
            raise ValueError("n must be nonnegative")
        coefs = [_as_number(c) for c in size_coefs]
        if _integral(coefs):
            coefs = [int(c) for c in coefs]
        coefs = coefs[: n + 1]
        while coefs and coefs[-1] == 0:
            coefs.pop()
        self.n = int(n)
        self.size_coefs = tuple(coefs)

    @property
    def degree(self) -> int:
        return max(len(self.size_coefs) - 1, 0)

    @property
    def constant_coefficient(self) -> Number:
        return self.size_coefs[0] if self.size_coefs else 0

    @property
    def is_integer(self) -> bool:
        return all(isinstance(c, int) for c in self.size_coefs)

    @property
    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.size_coefs)

    def __len__(self) -> int:
        return sum(math.comb(self.n, j) for j, c in enumerate(self.size_coefs) if c != 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, SymmetricPolynomial):
            return self.n == other.n and self.size_coefs == other.size_coefs
        if isinstance(other, MultilinearPolynomial):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.size_coefs))

    def __repr__(self) -> str:
        return f"SymmetricPolynomial(n={self.n}, size_coefs={list(self.size_coefs)})"

    def g(self, k: int) -> Number:
        return sum(c * math.comb(k, j) for j, c in enumerate(self.size_coefs))

    def weight_table(self) -> list:
        return [self.g(k) for k in range(self.n + 1)]

    @property
    def terms(self) -> dict:
        return self.expand().terms

    def evaluate(self, x: Sequence[int]) -> Number:
        return self.g(int(_check_assignment(x, self.n).sum()))

    __call__ = evaluate

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        return self._table_array()[popcount(masks)]

    def evaluate_rows(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise ValueError(f"expected a (samples, {self.n}) matrix")
        return self._table_array()[bits.sum(axis=1)]

    def _table_array(self) -> np.ndarray:
        table = self.weight_table()
        return np.array(table, dtype=np.int64 if self.is_integer else np.float64)

    def delta_increment(self, x: Sequence[int], i: int) -> Number:
        bits = _check_assignment(x, self.n)
        i = _check_index(i, self.n)
        w = int(bits.sum()) - int(bits[i])
        return self.g(w + 1) - self.g(w)

    def derivative(self, i: int) -> MultilinearPolynomial:
        return self.expand().derivative(i)

    def restrict(self, fixed: Mapping[int, int]) -> SymmetricPolynomial:
        for i, b in fixed.items():
            _check_index(i, self.n)
            if b not in (0, 1):
                raise ValueError("fixed values must be 0 or 1")
        ones = sum(fixed.values())
        m = self.n - len(fixed)
        shifted = [self.g(k + ones) for k in range(min(m, self.degree) + 1)]
        return SymmetricPolynomial(m, _from_weight_table(shifted))

    def expand(self) -> MultilinearPolynomial:
        terms = {}
        for j, c in enumerate(self.size_coefs):
            if c != 0:
                for mono in itertools.combinations(range(self.n), j):
                    terms[mono] = c
        return MultilinearPolynomial(self.n, terms)

    def to_dict(self) -> dict:
        return {"n": self.n, "symmetric": list(self.size_coefs)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


Polynomial = Union[MultilinearPolynomial, SymmetricPolynomial]


def _from_weight_table(table: Sequence[Number]) -> list:
    # inverse binomial transform: c_j = sum_i (-1)^(j-i) C(j,i) g(i)
    return [sum((-1) ** (j - i) * math.comb(j, i) * table[i] for i in range(j + 1)) for j in range(len(table))]


def popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.intp)


def detect_symmetric(f: Polynomial):
    """Weight table ``g(0..n)`` if f is invariant under all variable permutations, else None."""
    if isinstance(f, SymmetricPolynomial):
        return f.weight_table()
    by_size: dict[int, set] = {}
    for mono, c in f._terms.items():
        by_size.setdefault(len(mono), set()).add(c)
    size_coefs = [0] * (f.degree + 1)
    for j, coefs in by_size.items():
        if len(coefs) != 1:
            return None
        count = sum(1 for m in f._terms if len(m) == j)
        if count != math.comb(f.n, j):
            return None
        size_coefs[j] = next(iter(coefs))
    return SymmetricPolynomial(f.n, size_coefs).weight_table()


def as_symmetric(f: Polynomial):
    if isinstance(f, SymmetricPolynomial):
        return f
    table = detect_symmetric(f)
    if table is None:
        return None
    return SymmetricPolynomial(f.n, _from_weight_table(table[: f.degree + 1]))


def from_dict(data: Mapping) -> Polynomial:
    """Parse the JSON interchange form (``terms`` list, or ``symmetric`` size coefficients)."""
    if "n" not in data:
        raise ValueError("polynomial JSON needs an 'n' field")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError("'n' must be a nonnegative integer")
    if "symmetric" in data:
        return SymmetricPolynomial(n, data["symmetric"])
    terms = []
    seen = set()
    for t in data.get("terms", []):
        vars_ = list(t["vars"])
        if vars_ != sorted(set(vars_)):
            raise ValueError(f"term vars must be sorted and unique: {vars_}")
        if tuple(vars_) in seen:
            raise ValueError(f"duplicate monomial {vars_}")
        seen.add(tuple(vars_))
        terms.append((vars_, t["coef"]))
    return MultilinearPolynomial(n, terms)


def load(path) -> Polynomial:
    with open(path) as fh:
        return from_dict(json.load(fh))


def linear(coefs: Sequence[Number]) -> MultilinearPolynomial:
    return MultilinearPolynomial(len(coefs), [((i,), a) for i, a in enumerate(coefs)])
