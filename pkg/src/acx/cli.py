"""``acx`` command line: exact laws, concentration queries, ranks, bound checks and graph statistics.

Exit status is 0 on success, 1 when an exact inequality is violated and 2 on
usage errors or exceeded caps. Output goes to ``--out`` (default stdout) and
is only written once the whole computation has succeeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import bounds as B
from . import dist as D
from . import graphs as G
from .poly import Polynomial, SymmetricPolynomial, linear, load
from .rank import MNV, NONUNIFORM, rank_certificate
from .sampler import chunk_streams, default_window, erdos_process, expected_Y

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# -- shared helpers ---------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _extremal_poly(args) -> Polynomial:
    name = args.extremal
    n = args.n if args.n is not None else args.size
    if name == "matching":
        r = args.r if args.r is not None else args.size
        if r is None:
            raise UsageError("matching needs --r (or --size)")
        return B.matching_polynomial(r, args.d or 2)
    if n is None:
        raise UsageError(f"{name} needs --n (or --size)")
    if name == "power":
        return B.power_polynomial(n, args.d or 2)
    if name == "counterexample":
        return B.counterexample_polynomial(n)
    if name == "pm_split":
        return B.pm_split_polynomial(n)
    if name == "linear":
        return B.linear_sum_polynomial(n)
    raise UsageError(f"{name!r} is not a polynomial instance")


def _poly(args) -> Polynomial:
    if getattr(args, "poly", None):
        return load(args.poly)
    if getattr(args, "coefs", None):
        return linear(_ints(args.coefs))
    if getattr(args, "extremal", None):
        return _extremal_poly(args)
    raise UsageError("supply --poly FILE, --coefs LIST or --extremal NAME")


def _graph(args, seed_offset: int = 0) -> G.GraphInstance:
    if getattr(args, "input", None):
        return G.load_graph(args.input)
    if getattr(args, "gnp", None):
        n, p = args.gnp.split(",")
        return G.sample_gnp(int(n), float(p), args.seed + seed_offset)
    if getattr(args, "hyper", None):
        n, r, p = args.hyper.split(",")
        return G.sample_hypergraph(int(n), int(r), float(p), args.seed + seed_offset)
    if getattr(args, "extremal", None) == "clique":
        n = args.n if args.n is not None else args.size
        if n is None:
            raise UsageError("clique needs --n (or --size)")
        return G.complete_graph(n, args.r or 2)
    raise UsageError("supply --input FILE, --gnp N,P, --hyper N,R,P or --extremal clique")


def _random_graphs(args):
    """``--trials`` graphs from --gnp/--hyper with independent seeds, or the single input graph."""
    if args.input or not args.trials:
        return [_graph(args)]
    seeds = np.random.SeedSequence(args.seed).generate_state(args.trials, dtype=np.uint64)
    raw = args.gnp or args.hyper
    if raw is None:
        raise UsageError("--trials needs --gnp or --hyper")
    parts = raw.split(",")
    if args.gnp:
        return [G.sample_gnp(int(parts[0]), float(parts[1]), int(s)) for s in seeds]
    return [G.sample_hypergraph(int(parts[0]), int(parts[1]), float(parts[2]), int(s)) for s in seeds]


def _pattern(text: str) -> G.GraphInstance:
    if ":" in text:
        kind, k = text.split(":")
        build = {"path": G.path_graph, "star": G.star_graph, "complete": G.complete_graph}
        if kind not in build:
            raise UsageError(f"unknown pattern {kind!r}; use path:K, star:K, complete:K or a file")
        return build[kind](int(k))
    return G.load_graph(text)


def _histogram(values) -> list[tuple]:
    vals, freq = np.unique(np.asarray(values), return_counts=True)
    total = int(freq.sum())
    return [(v.item(), int(c), int(c) / total) for v, c in zip(vals, freq)]


def _mc_values(f: Polynomial, p: float, samples: int, seed: int) -> np.ndarray:
    out = []
    for seq, size in chunk_streams(seed, samples):
        rng = np.random.Generator(np.random.Philox(seq))
        out.append(f.evaluate_rows(rng.random((size, f.n)) < p))
    return np.concatenate(out) if out else np.zeros(0)


def _threshold(text: str, g: G.GraphInstance) -> Fraction:
    text = text.strip()
    if text == "lemma":
        return G.lemma_threshold(g)
    if text.startswith("avg"):
        rest = text[3:]
        div = Fraction(rest[1:]) if rest.startswith("/") else Fraction(1)
        if rest and not rest.startswith("/"):
            raise UsageError(f"cannot parse threshold {text!r}")
        return G.average_degree(g) / div
    return Fraction(text)


# -- commands -----------------------------------------------------------------------


def cmd_dist(args) -> tuple[str, int]:
    f = _poly(args)
    p = D.check_p(args.p)
    for t in args.t:
        if t < 0:
            raise UsageError("--t must be nonnegative")
    if args.mc:
        hist = _histogram(_mc_values(f, p, args.samples, args.seed))
        law = D.from_atoms([h[0] for h in hist], [h[2] for h in hist], n=f.n, p=p, method="mc")
        kind = "mc"
    else:
        try:
            law = D.exact_distribution(f, p)
        except D.CapExceeded as exc:
            raise UsageError(f"{exc}; rerun with --mc --samples N for a Monte Carlo histogram") from exc
        kind = "exact"
    qs = [(t, *D.concentration_function(law, t)) for t in args.t]
    if args.format == "csv":
        text = _csv(["value", "probability"], [(v, float(q)) for v, q in zip(law.values.tolist(), law.probs)])
        if qs:
            text += "\n" + _csv(["t", "Q", "x"], qs)
        return text, EXIT_OK
    return _dump({"kind": kind, "n": f.n, "p": p, "atoms": [[v, float(q)] for v, q in
                  zip(law.values.tolist(), law.probs)],
                  "Q": [{"t": t, "Q": q, "x": x} for t, q, x in qs]}), EXIT_OK


def cmd_qfunc(args) -> tuple[str, int]:
    f = _poly(args)
    p = D.check_p(args.p)
    if not args.t:
        raise UsageError("give at least one --t")
    if args.mc:
        hist = _histogram(_mc_values(f, p, args.samples, args.seed))
        law = D.from_atoms([h[0] for h in hist], [h[2] for h in hist], n=f.n, p=p)
    else:
        try:
            law = D.exact_distribution(f, p)
        except D.CapExceeded as exc:
            raise UsageError(f"{exc}; rerun with --mc for a plug-in estimate") from exc
    rows = [(t, *D.concentration_function(law, t)) for t in args.t]
    kind = "mc_plugin" if args.mc else "exact"
    if args.format == "csv":
        return _csv(["t", "Q", "x", "kind"], [(*r, kind) for r in rows]), EXIT_OK
    return _dump([{"t": t, "Q": q, "x": x, "kind": kind} for t, q, x in rows]), EXIT_OK


def cmd_rank(args) -> tuple[str, int]:
    f = _poly(args)
    cert = rank_certificate(f, args.mode, args.threshold, exact=args.exact, edge_cap=args.edge_cap)
    if args.format == "csv":
        return _csv(["edge"], [[" ".join(map(str, e))] for e in cert.matching]), EXIT_OK
    return _dump({"mode": args.mode, "threshold": args.threshold, **cert.to_dict()}), EXIT_OK


def _verify_reports(args) -> list[B.BoundReport]:
    th = args.theorem
    if th in ("nonneg-poisson", "weak-bound"):
        if args.random:
            return B.random_sweep(th, args.random, args.nmax, args.seed, args.dmax)
        f = _poly(args)
        if args.p is None:
            raise UsageError("--p is required")
        return [B.check_nonneg_poisson(f, args.p) if th == "nonneg-poisson" else B.check_weak_bound(f, args.p)]
    if th == "t1.1":
        return [B.check_t11(_poly(args), args.p if args.p is not None else 0.5,
                            samples=args.samples, seed=args.seed)]
    if th == "t1.2":
        if args.s is None:
            raise UsageError("--s is required")
        return [B.check_t12(_poly(args), args.p if args.p is not None else 0.5, args.s)]
    if th in ("p1.4", "p1.5"):
        if args.k is None:
            raise UsageError("--k is required")
        g = _graph(args)
        if th == "p1.5":
            return [B.check_p15(g, args.k)]
        return [B.check_p14(g, args.k, args.ell, samples=args.samples, seed=args.seed)]
    if th == "t1.9":
        if args.n is None or args.p is None or not args.pattern:
            raise UsageError("t1.9 needs --pattern, --n and --p")
        return [B.check_t19(_pattern(args.pattern), args.n, args.p, args.trials or 2000, args.seed)]
    if th == "t1.10":
        if args.n is None or args.p is None or args.h is None:
            raise UsageError("t1.10 needs --h, --n and --p")
        return [B.check_t110(args.h, args.n, args.p, args.trials or 2000, args.seed)]
    if th == "bessel":
        if args.lam is None or args.n is None:
            raise UsageError("bessel needs --lambda and --n")
        coefs = _ints(args.coefs) if args.coefs else None
        return [B.check_bessel(args.lam, args.n, coefs)]
    raise UsageError(f"unknown theorem {th!r}")


def cmd_verify(args) -> tuple[str, int]:
    reports = _verify_reports(args)
    violated = any(r.verdict == B.VIOLATED and r.theorem in B.EXACT_THEOREMS for r in reports)
    text = B.reports_csv(reports) if args.format == "csv" else B.reports_json(reports) + "\n"
    return text, EXIT_VIOLATION if violated else EXIT_OK


def cmd_graph(args) -> tuple[str, int]:
    sub = args.graph_cmd
    if sub == "sample":
        g = _graph(args)
        if args.format == "csv":
            return _csv(["edge"], [[" ".join(map(str, e))] for e in g.edges]), EXIT_OK
        return g.to_json() + "\n", EXIT_OK
    if sub in ("cliques", "copies"):
        if sub == "cliques":
            if args.h is None:
                raise UsageError("--h is required")
            stat = lambda g: G.count_cliques(g, args.h)  # noqa: E731
        else:
            if not args.pattern:
                raise UsageError("--pattern is required")
            H = _pattern(args.pattern)
            stat = lambda g: G.count_copies(H, g, args.mode)  # noqa: E731
        values = [stat(g) for g in _random_graphs(args)]
        hist = _histogram(values)
        if args.format == "csv":
            return _csv(["value", "count", "frequency"], hist), EXIT_OK
        return _dump({"trials": len(values), "mean": float(np.mean(values)),
                      "histogram": [list(h) for h in hist]}), EXIT_OK
    if sub == "edgestat":
        g = _graph(args)
        if args.k is None:
            raise UsageError("--k is required")
        if args.mode == "exact":
            law = G.edge_statistic_distribution(g, args.k)
            rows = [(v, q) for v, q in sorted(law.items())]
            if args.format == "csv":
                return _csv(["value", "probability"], rows), EXIT_OK
            return _dump({"k": args.k, "exact": [list(r) for r in rows]}), EXIT_OK
        seeds = np.random.SeedSequence(args.seed).generate_state(args.trials or 1, dtype=np.uint64)
        samples = [G.edge_statistic(g, args.k, args.mode, int(s)) for s in seeds]
        hist = _histogram([s.value for s in samples])
        if args.format == "csv":
            return _csv(["value", "count", "frequency"], hist), EXIT_OK
        return _dump({"k": args.k, "mode": args.mode, "trials": len(samples),
                      "histogram": [list(h) for h in hist],
                      "first": {"vertices": list(samples[0].vertices), "value": samples[0].value}}), EXIT_OK
    if sub == "dispersed":
        g = _graph(args)
        if args.h is None:
            raise UsageError("--h is required")
        mode = "exact" if args.exact else "sampled"
        rep = G.dispersedness_check(g, args.c, args.q, args.h, mode=mode, budget=args.budget, seed=args.seed)
        if args.format == "csv":
            return rep.histogram_csv(), EXIT_OK
        return _dump(rep.to_dict()), EXIT_OK
    if sub == "mindeg":
        g = _graph(args)
        thr = _threshold(args.threshold, g)
        keep = G.min_degree_subgraph(g, thr)
        if args.format == "csv":
            return _csv(["vertex"], [[v] for v in keep]), EXIT_OK
        return _dump({"threshold": str(thr), "survivors": keep, "size": len(keep),
                      "min_induced_degree": G.induced_min_degree(g, keep) if keep else None}), EXIT_OK
    raise UsageError(f"unknown graph command {sub!r}")


def cmd_process(args) -> tuple[str, int]:
    f = _poly(args)
    p = D.check_p(args.p)
    window = default_window(f.n, p, args.delta)
    x = args.x
    if x is None:
        if not isinstance(f, SymmetricPolynomial):
            raise UsageError("--x is required for non-symmetric polynomials")
        x = float(f.g(D.binomial_mode(f.n, p)))
    trace = erdos_process(f, p, x, args.s, seed=args.seed, window=window)
    if args.format == "csv":
        return trace.to_csv(), EXIT_OK
    out = json.loads(trace.to_json())
    if args.expected:
        out["expected_Y"] = expected_Y(f, p, x, args.s, window)
    return _dump(out), EXIT_OK


def cmd_sweep(args) -> tuple[str, int]:
    f = _poly(args)
    ns = _ints(args.ns) if args.ns else [f.n]
    ps = _floats(args.ps)
    for p in ps:
        D.check_p(p)
    try:
        rows = B.sweep_point_mass(f, ns, ps)
    except D.CapExceeded as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "csv":
        keys = ["n", "p", "max_point_mass", "argmax", "sqrt_np", "modal_binomial"]
        return _csv(keys, [[r[k] for k in keys] for r in rows]), EXIT_OK
    return _dump(rows), EXIT_OK


# -- parser ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")


def _poly_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--poly", help="polynomial JSON file")
    p.add_argument("--coefs", help="comma-separated integer coefficients of a linear form")
    p.add_argument("--extremal", choices=sorted(B.extremal_instances()))
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--size", type=int, help="size parameter of --extremal when --n/--r is absent")


def _graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="graph JSON file")
    p.add_argument("--gnp", help="sample G(n, p): N,P")
    p.add_argument("--hyper", help="sample an r-uniform G^r(n, p): N,R,P")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="acx", description=__doc__.splitlines()[0])
    subs = ap.add_subparsers(dest="command", required=True)

    d = subs.add_parser("dist", help="law of f(xi) for xi ~ Ber(p)^n")
    _common(d)
    _poly_source(d)
    d.add_argument("--p", type=float, required=True)
    d.add_argument("--t", type=float, action="append", default=[])
    d.add_argument("--mc", action="store_true", help="Monte Carlo histogram instead of the exact law")
    d.add_argument("--samples", type=int, default=100_000)
    d.set_defaults(run=cmd_dist)

    q = subs.add_parser("qfunc", help="concentration function Q(t) = sup_x Pr(x <= f <= x + t)")
    _common(q)
    _poly_source(q)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--t", type=float, action="append", default=[])
    q.add_argument("--mc", action="store_true")
    q.add_argument("--samples", type=int, default=100_000)
    q.set_defaults(run=cmd_qfunc)

    r = subs.add_parser("rank", help="matching certificate for the rank of f")
    _common(r)
    _poly_source(r)
    r.add_argument("--mode", choices=(MNV, NONUNIFORM), default=NONUNIFORM)
    r.add_argument("--threshold", type=float, default=1.0)
    r.add_argument("--exact", action="store_true")
    r.add_argument("--edge-cap", type=int, default=30)
    r.set_defaults(run=cmd_rank)

    v = subs.add_parser("verify", help="check an anti-concentration bound on an instance")
    _common(v)
    _poly_source(v)
    _graph_source(v)
    v.add_argument("--theorem", required=True, choices=sorted(set(B.EXACT_THEOREMS + B.ASYMPTOTIC_THEOREMS)))
    v.add_argument("--p", type=float)
    v.add_argument("--s", type=float)
    v.add_argument("--k", type=int)
    v.add_argument("--ell", type=float)
    v.add_argument("--h", type=int)
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--pattern", help="pattern graph: file or path:K / star:K / complete:K")
    v.add_argument("--random", type=int, default=0, help="number of random instances")
    v.add_argument("--nmax", type=int, default=16)
    v.add_argument("--dmax", type=int, default=4)
    v.add_argument("--samples", type=int, default=200_000)
    v.add_argument("--trials", type=int)
    v.set_defaults(run=cmd_verify)

    g = subs.add_parser("graph", help="graph statistics")
    gsubs = g.add_subparsers(dest="graph_cmd", required=True)
    for name, hlp in [("sample", "draw G(n, p) or G^r(n, p)"), ("cliques", "K_h counts"),
                      ("copies", "copies of a pattern graph"), ("edgestat", "induced edge counts"),
                      ("dispersed", "(c, q, h)-dispersedness"), ("mindeg", "peel to a min-degree core")]:
        s = gsubs.add_parser(name, help=hlp)
        _common(s)
        _graph_source(s)
        s.add_argument("--extremal", choices=["clique"])
        s.add_argument("--n", type=int)
        s.add_argument("--r", type=int)
        s.add_argument("--size", type=int)
        s.set_defaults(run=cmd_graph)
        if name in ("cliques", "copies", "edgestat"):
            s.add_argument("--trials", type=int)
        if name in ("cliques", "dispersed"):
            s.add_argument("--h", type=int)
        if name == "copies":
            s.add_argument("--pattern")
            s.add_argument("--mode", choices=("labelled", "unlabelled"), default="unlabelled")
        if name == "edgestat":
            s.add_argument("--k", type=int)
            s.add_argument("--mode", choices=("uniform", "bernoulli", "exact"), default="uniform")
        if name == "dispersed":
            s.add_argument("--c", type=float, default=0.25)
            s.add_argument("--q", type=float, default=0.5)
            s.add_argument("--exact", action="store_true")
            s.add_argument("--budget", type=int, default=2000)
        if name == "mindeg":
            s.add_argument("--threshold", default="lemma", help="number, 'avg', 'avg/R' or 'lemma'")

    pr = subs.add_parser("process", help="trace of the random bit-flip process")
    _common(pr)
    _poly_source(pr)
    pr.add_argument("--p", type=float, required=True)
    pr.add_argument("--x", type=float)
    pr.add_argument("--s", type=float, default=0.5)
    pr.add_argument("--delta", type=float)
    pr.add_argument("--expected", action="store_true", help="also report the exact E[Y]")
    pr.set_defaults(run=cmd_process)

    sw = subs.add_parser("sweep", help="largest point probability over an (n, p) grid")
    _common(sw)
    _poly_source(sw)
    sw.add_argument("--ns", help="n values: comma list, ranges as a:b")
    sw.add_argument("--ps", required=True, help="comma-separated p values")
    sw.set_defaults(run=cmd_sweep)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="acx: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, status = args.run(args)
    except (UsageError, D.CapExceeded, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"acx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
