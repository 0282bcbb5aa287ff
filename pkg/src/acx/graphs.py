"""Graphs and uniform hypergraphs: G(n,p), clique and copy counts, edge statistics."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .dist import _zeta
from .poly import MultilinearPolynomial, popcount
from .sampler import wilson_interval

COPY_CAP = 8
EXACT_DISPERSED_CAP = 18
EXACT_EDGESTAT_CAP = 24


@dataclass(frozen=True, eq=False)
class GraphInstance:
    """Simple graph (r = 2) or r-uniform hypergraph on vertices 0..n-1."""

    n: int
    edges: tuple
    r: int = 2

    def __post_init__(self):
        edges = []
        for e in self.edges:
            e = tuple(sorted(int(v) for v in e))
            if len(e) != self.r or len(set(e)) != self.r:
                raise ValueError(f"edge {e} is not a set of {self.r} distinct vertices")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"edge {e} has a vertex outside [0, {self.n})")
            edges.append(e)
        edges.sort()
        if any(a == b for a, b in zip(edges, edges[1:])):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", tuple(edges))

    def __eq__(self, other):
        if not isinstance(other, GraphInstance):
            return NotImplemented
        return (self.n, self.r, self.edges) == (other.n, other.r, other.edges)

    def __hash__(self):
        return hash((self.n, self.r, self.edges))

    def __repr__(self):
        return f"GraphInstance(n={self.n}, r={self.r}, e={self.m})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> list[int]:
        """Neighbourhood bitsets (graphs only)."""
        if self.r != 2:
            raise ValueError("adjacency bitsets are defined for graphs (r = 2)")
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    @cached_property
    def edge_masks(self) -> list[int]:
        return [sum(1 << v for v in e) for e in self.edges]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbours(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def with_edge(self, u: int, v: int) -> GraphInstance:
        e = tuple(sorted((u, v)))
        if e in set(self.edges):
            return self
        return GraphInstance(self.n, self.edges + (e,), self.r)

    def without_edge(self, u: int, v: int) -> GraphInstance:
        e = tuple(sorted((u, v)))
        return GraphInstance(self.n, tuple(x for x in self.edges if x != e), self.r)

    def induced(self, vertices: Iterable[int]) -> GraphInstance:
        """G[vertices], re-indexed in increasing vertex order."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [tuple(index[v] for v in e) for e in self.edges if all(v in index for v in e)]
        return GraphInstance(len(keep), tuple(edges), self.r)

    def delete_vertex(self, v: int) -> GraphInstance:
        return self.induced(u for u in range(self.n) if u != v)

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        mask = sum(1 << v for v in set(vertices))
        return sum(1 for em in self.edge_masks if em & mask == em)

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def graph_from_dict(data) -> GraphInstance:
    for key in ("n", "edges"):
        if key not in data:
            raise ValueError(f"graph JSON needs an {key!r} field")
    return GraphInstance(int(data["n"]), tuple(tuple(e) for e in data["edges"]), int(data.get("r", 2)))


def load_graph(path) -> GraphInstance:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def complete_graph(n: int, r: int = 2) -> GraphInstance:
    return GraphInstance(n, tuple(itertools.combinations(range(n), r)), r)


def empty_graph(n: int, r: int = 2) -> GraphInstance:
    return GraphInstance(n, (), r)


def path_graph(n: int) -> GraphInstance:
    return GraphInstance(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> GraphInstance:
    return GraphInstance(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def sample_gnp(n: int, p: float, seed: int = 0) -> GraphInstance:
    """G(n, p): pairs in lexicographic order, each kept with probability p."""
    return sample_hypergraph(n, 2, p, seed)


def sample_hypergraph(n: int, r: int, p: float, seed: int = 0) -> GraphInstance:
    """Random r-uniform hypergraph with every r-set present independently with probability p."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(np.random.Philox(seed))
    sets = list(itertools.combinations(range(n), r))
    keep = rng.random(len(sets)) < p
    return GraphInstance(n, tuple(e for e, k in zip(sets, keep) if k), r)


# -- clique and copy counts -------------------------------------------------------


def count_cliques(g: GraphInstance, h: int, within: Optional[int] = None) -> int:
    """Number of h-vertex cliques, optionally inside the vertex bitset ``within``."""
    if h < 1:
        raise ValueError("h must be at least 1")
    cand = (1 << g.n) - 1 if within is None else within
    if h == 1:
        return cand.bit_count()
    adj = g.adj

    def rec(cand: int, depth: int) -> int:
        total = 0
        while cand:
            v = cand.bit_length() - 1
            cand ^= 1 << v
            inner = cand & adj[v]
            if depth == 2:
                total += inner.bit_count()
            elif inner.bit_count() >= depth - 1:
                total += rec(inner, depth - 1)
        return total

    return rec(cand, h)


def list_cliques(g: GraphInstance, h: int) -> list[int]:
    """All h-cliques as vertex bitsets."""
    adj = g.adj
    out: list[int] = []

    def rec(cand: int, depth: int, acc: int) -> None:
        if depth == 0:
            out.append(acc)
            return
        while cand:
            v = cand.bit_length() - 1
            cand ^= 1 << v
            rec(cand & adj[v], depth - 1, acc | 1 << v)

    rec((1 << g.n) - 1, h, 0)
    return out


def _search_order(H: GraphInstance, fixed: Sequence[int] = ()) -> list[int]:
    order = list(fixed)
    rest = set(range(H.n)) - set(order)
    while rest:
        # most already-placed neighbours first, then highest degree
        v = max(sorted(rest), key=lambda w: (sum(H.has_edge(w, u) for u in order), H.degree(w)))
        order.append(v)
        rest.remove(v)
    return order


def _count_embeddings(H: GraphInstance, g: GraphInstance, pinned: dict) -> int:
    """Injective maps V(H) -> V(g) sending edges to edges and extending ``pinned``."""
    order = _search_order(H, list(pinned))
    back = [[u for u in order[:i] if H.has_edge(order[i], u)] for i in range(len(order))]
    adj = g.adj
    full = (1 << g.n) - 1
    image = [0] * H.n
    start = len(pinned)
    used = 0
    for a, x in pinned.items():
        image[a] = x
        used |= 1 << x

    def rec(i: int, used: int) -> int:
        w = order[i]
        cand = full & ~used
        for u in back[i]:
            cand &= adj[image[u]]
        if i == len(order) - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            image[w] = low.bit_length() - 1
            total += rec(i + 1, used | low)
        return total

    if start == len(order):
        return 1
    return rec(start, used)


def automorphism_count(H: GraphInstance) -> int:
    if H.n > COPY_CAP:
        raise ValueError(f"pattern has {H.n} vertices, cap is {COPY_CAP}")
    edges = set(H.edges)
    return sum(1 for perm in itertools.permutations(range(H.n))
               if all(tuple(sorted((perm[u], perm[v]))) in edges for u, v in H.edges))


def _check_pattern(H: GraphInstance) -> None:
    if H.r != 2:
        raise ValueError("patterns must be graphs")
    if H.n > COPY_CAP:
        raise ValueError(f"pattern has {H.n} vertices, cap is {COPY_CAP}")
    if any(H.degree(v) == 0 for v in range(H.n)):
        raise ValueError("pattern has isolated vertices; strip them first")


def count_copies(H: GraphInstance, g: GraphInstance, mode: str = "unlabelled") -> int:
    """Copies of H in g.

    ``labelled`` counts injective edge-preserving maps V(H) -> V(g);
    ``unlabelled`` counts subgraphs isomorphic to H, i.e. labelled / |Aut(H)|.
    """
    _check_pattern(H)
    labelled = _count_embeddings(H, g, {}) if H.n <= g.n else 0
    if mode == "labelled":
        return labelled
    if mode != "unlabelled":
        raise ValueError(f"unknown mode {mode!r}")
    return labelled // automorphism_count(H)


def delta_edge(g: GraphInstance, H: GraphInstance, u: int, v: int) -> int:
    """Labelled copies of H gained by adding {u, v}: X_H(g + uv) - X_H(g - uv).

    Each such copy sends exactly one edge of H onto {u, v}, so this is a sum,
    over ordered edges (a, b) of H, of embeddings pinned at a -> u, b -> v.
    """
    if u == v:
        raise ValueError("u and v must differ")
    _check_pattern(H)
    g_plus = g.with_edge(u, v)
    total = 0
    for a, b in H.edges:
        total += _count_embeddings(H, g_plus, {a: u, b: v})
        total += _count_embeddings(H, g_plus, {a: v, b: u})
    return total


def expected_delta_edge(H: GraphInstance, n: int, p: float) -> float:
    """E[delta_edge] in G(n, p): 2 e(H) p^(e(H)-1) (n-2)(n-3)...(n-h+1)."""
    h, e = H.n, H.m
    return 2 * e * p ** (e - 1) * math.perm(n - 2, h - 2)


def expected_Ek(k: int, h: int, p: float) -> float:
    """p^C(h-1,2) C(k, h-1): mean number of K_(h-1) in a fixed k-set of G(., p)."""
    if k < 0 or h < 1:
        raise ValueError("need k >= 0 and h >= 1")
    return p ** math.comb(h - 1, 2) * math.comb(k, h - 1)


# -- edge statistics ------------------------------------------------------------


@dataclass(frozen=True)
class EdgeStatisticSample:
    vertices: tuple
    value: int
    mode: str
    k: int


def edge_statistic(g: GraphInstance, k: int, mode: str = "uniform", seed: int = 0) -> EdgeStatisticSample:
    """Induced (hyper)edge count of a random vertex set.

    ``uniform`` draws a uniform k-set; ``bernoulli`` keeps each vertex with
    probability k/n independently.
    """
    if not 0 <= k <= g.n:
        raise ValueError("need 0 <= k <= n")
    rng = np.random.Generator(np.random.Philox(seed))
    if mode == "uniform":
        chosen = sorted(int(v) for v in rng.choice(g.n, size=k, replace=False))
    elif mode == "bernoulli":
        chosen = [int(v) for v in np.flatnonzero(rng.random(g.n) < k / g.n)] if g.n else []
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return EdgeStatisticSample(tuple(chosen), g.induced_edge_count(chosen), mode, k)


def subset_edge_counts(g: GraphInstance) -> np.ndarray:
    """Induced edge count of every vertex subset, indexed by bitmask."""
    if g.n > EXACT_EDGESTAT_CAP:
        raise ValueError(f"exact subset enumeration is capped at n = {EXACT_EDGESTAT_CAP}")
    a = np.zeros(1 << g.n, dtype=np.int64)
    np.add.at(a, np.array(g.edge_masks, dtype=np.intp), 1)
    _zeta(a, g.n)
    return a


def edge_statistic_distribution(g: GraphInstance, k: int) -> dict[int, float]:
    """Exact law of X_{G,k} over all C(n, k) vertex sets."""
    counts = subset_edge_counts(g)
    sizes = popcount(np.arange(1 << g.n, dtype=np.uint64))
    vals, freq = np.unique(counts[sizes == k], return_counts=True)
    total = math.comb(g.n, k)
    return {int(v): int(c) / total for v, c in zip(vals, freq)}


def edge_polynomial(g: GraphInstance) -> MultilinearPolynomial:
    """sum over edges e of prod_{i in e} xi_i; at vertex indicators this is e(G[A])."""
    return MultilinearPolynomial(g.n, {e: 1 for e in g.edges})


# -- peeling -------------------------------------------------------------------


def average_degree(g: GraphInstance) -> Fraction:
    return Fraction(g.r * g.m, g.n) if g.n else Fraction(0)


def lemma_threshold(g: GraphInstance) -> Fraction:
    """(average degree) / r, the level up to which peeling provably leaves a nonempty core."""
    return average_degree(g) / g.r


def induced_min_degree(g: GraphInstance, vertices: Iterable[int]) -> int:
    vs = set(vertices)
    if not vs:
        return 0
    deg = dict.fromkeys(vs, 0)
    for e in g.edges:
        if all(v in vs for v in e):
            for v in e:
                deg[v] += 1
    return min(deg.values())


def min_degree_subgraph(g: GraphInstance, threshold) -> list[int]:
    """Repeatedly delete vertices of induced degree < threshold; return the survivors."""
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for k, e in enumerate(g.edges):
        for v in e:
            incident[v].append(k)
    deg = [len(x) for x in incident]
    alive_v = [True] * g.n
    alive_e = [True] * g.m
    stack = [v for v in range(g.n) if deg[v] < threshold]
    queued = set(stack)
    while stack:
        v = stack.pop()
        alive_v[v] = False
        for k in incident[v]:
            if alive_e[k]:
                alive_e[k] = False
                for w in g.edges[k]:
                    if w != v and alive_v[w]:
                        deg[w] -= 1
                        if deg[w] < threshold and w not in queued:
                            queued.add(w)
                            stack.append(w)
    survivors = [v for v in range(g.n) if alive_v[v]]
    if g.m and threshold <= lemma_threshold(g):
        assert survivors, "peeling below average degree / r emptied the graph"
    return survivors


# -- dispersedness ----------------------------------------------------------------


@dataclass(frozen=True)
class DispersednessReport:
    c: float
    q: float
    h: int
    mode: str
    verdict: str
    worst: list = field(default_factory=list)  # per k: k, ell, count, ratio (, ucl)
    histogram: list = field(default_factory=list)  # rows (k, ell, count, frequency)
    certified: bool = False

    @property
    def max_ratio(self) -> float:
        return max((w["ratio"] for w in self.worst), default=0.0)

    def to_dict(self) -> dict:
        return {"c": self.c, "q": self.q, "h": self.h, "mode": self.mode, "verdict": self.verdict,
                "certified": self.certified, "max_ratio": self.max_ratio, "worst": self.worst}

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "ell", "count", "frequency"])
        for row in self.histogram:
            w.writerow([row[0], row[1], row[2], repr(row[3])])
        return buf.getvalue()


def subset_clique_counts(g: GraphInstance, h: int) -> np.ndarray:
    """Number of K_h inside every vertex subset, indexed by bitmask."""
    a = np.zeros(1 << g.n, dtype=np.int64)
    cliques = list_cliques(g, h)
    if cliques:
        np.add.at(a, np.array(cliques, dtype=np.intp), 1)
    _zeta(a, g.n)
    return a


def k_range(n: int, c: float) -> range:
    return range(math.ceil(c * n), math.floor((1 - c) * n) + 1)


def dispersedness_check(g: GraphInstance, c: float, q: float, h: int, mode: str = "exact",
                        budget: int = 2000, seed: int = 0, level: float = 0.99) -> DispersednessReport:
    """Is every k-set count histogram (k in [cn, (1-c)n]) bounded by a q-fraction?

    Exact mode enumerates all subsets (n <= 18) and certifies the verdict.
    Sampled mode only reports evidence: per k it draws ``budget`` random
    k-sets and gives the observed top frequency with a Wilson upper limit.
    """
    if not 0 < c < 0.5:
        raise ValueError("c must lie in (0, 1/2)")
    ks = k_range(g.n, c)
    worst, hist = [], []
    if mode == "exact":
        if g.n > EXACT_DISPERSED_CAP:
            raise ValueError(f"exact dispersedness is capped at n = {EXACT_DISPERSED_CAP}")
        ells = subset_clique_counts(g, h)
        sizes = popcount(np.arange(1 << g.n, dtype=np.uint64))
        for k in ks:
            vals, freq = np.unique(ells[sizes == k], return_counts=True)
            total = math.comb(g.n, k)
            for v, f in zip(vals, freq):
                hist.append((k, int(v), int(f), int(f) / total))
            i = int(np.argmax(freq))
            worst.append({"k": k, "ell": int(vals[i]), "count": int(freq[i]), "ratio": int(freq[i]) / total})
        ok = all(w["ratio"] <= q for w in worst)
        return DispersednessReport(c, q, h, mode, "dispersed" if ok else "not dispersed", worst, hist, True)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.Generator(np.random.Philox(seed))
    against = False
    for k in ks:
        tally: dict[int, int] = {}
        for _ in range(budget):
            chosen = rng.choice(g.n, size=k, replace=False)
            mask = sum(1 << int(v) for v in chosen)
            ell = count_cliques(g, h, within=mask)
            tally[ell] = tally.get(ell, 0) + 1
        for ell in sorted(tally):
            hist.append((k, ell, tally[ell], tally[ell] / budget))
        ell, cnt = max(sorted(tally.items()), key=lambda kv: kv[1])
        lo, hi = wilson_interval(cnt, budget, level)
        worst.append({"k": k, "ell": ell, "count": cnt, "ratio": cnt / budget, "ucl": hi})
        against |= lo > q
    verdict = "evidence against" if against else "no evidence against"
    return DispersednessReport(c, q, h, mode, verdict, worst, hist, False)
