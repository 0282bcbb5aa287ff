"""Rank of a polynomial as a matching in its large-coefficient hypergraph."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from .poly import Polynomial, SymmetricPolynomial

log = logging.getLogger(__name__)

MNV = "mnv"
NONUNIFORM = "nonuniform"
EDGE_CAP = 30


class EdgeCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientHypergraph:
    n: int
    edges: tuple  # sorted tuple of sorted vertex tuples

    def __post_init__(self):
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate hyperedges")


@dataclass(frozen=True)
class RankCertificate:
    matching: tuple
    exact: bool

    @property
    def size(self) -> int:
        return len(self.matching)

    def __post_init__(self):
        seen: set = set()
        for e in self.matching:
            if seen.intersection(e):
                raise ValueError("matching edges are not pairwise disjoint")
            seen.update(e)

    def to_dict(self) -> dict:
        return {"size": self.size, "exact": self.exact, "matching": [list(e) for e in self.matching]}


def build_hypergraph(f: Polynomial, mode: str = NONUNIFORM, threshold: float = 1.0) -> CoefficientHypergraph:
    """Edges are the monomials with |coefficient| >= threshold.

    ``mnv`` keeps only monomials of size equal to the degree; ``nonuniform``
    keeps every nonempty monomial.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if mode not in (MNV, NONUNIFORM):
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(f, SymmetricPolynomial):
        f = f.expand()
    d = f.degree
    edges = [m for m, c in f.terms.items()
             if m and abs(c) >= threshold and (mode == NONUNIFORM or len(m) == d)]
    return CoefficientHypergraph(f.n, tuple(sorted(edges)))


def upper_bound(h: CoefficientHypergraph) -> int:
    """min(|edges|, covered vertices // smallest edge size)."""
    if not h.edges:
        return 0
    covered = len({v for e in h.edges for v in e})
    return min(len(h.edges), covered // min(len(e) for e in h.edges))


def greedy_matching(h: CoefficientHypergraph) -> RankCertificate:
    """One lexicographic pass; the result is maximal, not necessarily maximum.

    The certificate is marked exact when it meets :func:`upper_bound`.
    """
    used: set = set()
    chosen = []
    for e in sorted(h.edges):
        if used.isdisjoint(e):
            chosen.append(e)
            used.update(e)
    return RankCertificate(tuple(chosen), exact=len(chosen) == upper_bound(h))


def exact_matching(h: CoefficientHypergraph, edge_cap: int = EDGE_CAP) -> RankCertificate:
    """Maximum matching by branch and bound.

    Branches on the lowest vertex still covered by a live edge: either that
    vertex stays unmatched, or one of its edges is taken. The bound is
    min(live edges, live vertices // smallest live edge).
    """
    if len(h.edges) > edge_cap:
        raise EdgeCapExceeded(f"{len(h.edges)} edges exceed the exact-matching cap {edge_cap}")
    masks = [sum(1 << v for v in e) for e in h.edges]
    best = list(greedy_matching(h).matching)
    best_idx: list[int] = [h.edges.index(e) for e in best]
    by_index = sorted(range(len(masks)), key=lambda i: h.edges[i])

    def bound(live: list[int]) -> int:
        if not live:
            return 0
        cover = 0
        for i in live:
            cover |= masks[i]
        smallest = min(len(h.edges[i]) for i in live)
        return min(len(live), cover.bit_count() // smallest)

    def search(live: list[int], taken: list[int]) -> None:
        nonlocal best_idx
        if len(taken) > len(best_idx):
            best_idx = list(taken)
        if len(taken) + bound(live) <= len(best_idx):
            return
        cover = 0
        for i in live:
            cover |= masks[i]
        v = (cover & -cover)
        with_v = [i for i in live if masks[i] & v]
        for i in with_v:
            rest = [j for j in live if not masks[j] & masks[i]]
            search(rest, taken + [i])
        search([j for j in live if not masks[j] & v], taken)

    search(by_index, [])
    return RankCertificate(tuple(sorted(h.edges[i] for i in best_idx)), exact=True)


def rank_certificate(f: Polynomial, mode: str = NONUNIFORM, threshold: float = 1.0,
                     exact: bool = True, edge_cap: int = EDGE_CAP) -> RankCertificate:
    """Exact rank when the hypergraph is small enough, else the greedy lower bound."""
    h = build_hypergraph(f, mode, threshold)
    greedy = greedy_matching(h)
    if greedy.exact:
        return greedy
    if exact:
        try:
            return exact_matching(h, edge_cap)
        except EdgeCapExceeded:
            log.warning("exact matching skipped (%d edges > cap %d); using greedy lower bound",
                        len(h.edges), edge_cap)
    return greedy

