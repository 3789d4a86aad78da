"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
ceiling.  Output is deterministic for a fixed set of flags: no timings or
other run-dependent data are ever printed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from . import confalg, cosimp, fanic, fans, graphcx, hochschild
from .linalg import homology_dims, rank, two_prime_rank

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
SUITES = ("all", "fans", "graphcx", "fanic", "cosimp", "hochschild")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    d: int = 4
    p_max: int = 5
    degree_max: Optional[int] = None
    n: int = 2
    q_max: Optional[int] = None
    output_format: str = "json"
    prime_policy: str = "exact"
    seed: int = 0
    jobs: int = 1
    quick: bool = False

    def validate(self, min_d: int = 3) -> None:
        if self.d < min_d:
            raise UsageError(f"--d must be >= {min_d} (got {self.d})")
        if self.p_max < 2:
            raise UsageError(f"--pmax must be >= 2 (got {self.p_max})")
        if self.n < 0:
            raise UsageError("--n must be nonnegative")
        if self.degree_max is not None and self.degree_max < 0:
            raise UsageError("--degree-max must be nonnegative")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")


# ---------------------------------------------------------------------------
# rendering


def _render_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _render_rows(rows: List[Dict[str, object]], columns: Sequence[str], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])
        return buf.getvalue()
    widths = [max([len(c)] + [len(_cell(r[c])) for r in rows]) for c in columns]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    for r in rows:
        lines.append("  ".join(_cell(r[c]).rjust(w) for c, w in zip(columns, widths)))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _table_output(payload: Dict[str, object], rows_key: str, columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return _render_json(payload)
    return _render_rows(payload[rows_key], columns, fmt)


# ---------------------------------------------------------------------------
# commands


def cmd_e2(cfg: RunConfig) -> tuple:
    cfg.validate()
    page = hochschild.e2_page(cfg.d, cfg.p_max, prime_policy=cfg.prime_policy, seed=cfg.seed)
    entries = []
    for p in range(cfg.p_max + 1):
        for k in range(max(cfg.p_max, 1)):
            q = k * (cfg.d - 1)
            dim = page.get(p, q)
            prov = (p, q) in page.provisional
            if dim:
                entries.append({
                    "p": p, "q": q, "dim": dim, "provisional": prov,
                    "total_degree": q - p, "provenance": page.provenance.get((p, q), "exact"),
                })
    entries.sort(key=lambda e: (e["p"], e["q"]))
    payload = {
        "d": cfg.d, "page": "E2", "p_max": cfg.p_max, "prime_policy": cfg.prime_policy,
        "seed": cfg.seed, "entries": entries,
        "disagreements": [{"p": p, "q": q} for p, q in sorted(page.disagreements)],
    }
    cols = ["p", "q", "dim", "provisional"]
    if cfg.output_format == "text":
        cols = ["p", "q", "total_degree", "dim", "provisional", "provenance"]
    return _table_output(payload, "entries", cols, cfg.output_format), EXIT_OK


def _degree_for_pmax(d: int, p_max: int) -> int:
    deg = 0
    while hochschild.certifying_pmax(d, deg + 1) <= p_max:
        deg += 1
    return deg


def cmd_knots(cfg: RunConfig) -> tuple:
    if cfg.d == 3:
        raise UsageError("d = 3 is refused: it is not known what the spectral sequence converges to for classical knots")
    cfg.validate(min_d=4)
    if cfg.degree_max is not None:
        degree_max = cfg.degree_max
        p_max = max(cfg.p_max, hochschild.certifying_pmax(cfg.d, degree_max))
    else:
        p_max = cfg.p_max
        degree_max = _degree_for_pmax(cfg.d, p_max)
    bar, emb = hochschild.knot_betti_table(cfg.d, degree_max, p_max=p_max, prime_policy=cfg.prime_policy, seed=cfg.seed)
    rows = [{"degree": i, "emb_bar": bar.coefficient(i), "emb": emb.coefficient(i)} for i in range(degree_max + 1)]
    payload = {"d": cfg.d, "p_max": p_max, "degree_max": degree_max, "prime_policy": cfg.prime_policy, "rows": rows}
    return _table_output(payload, "rows", ["degree", "emb_bar", "emb"], cfg.output_format), EXIT_OK


def cmd_normalized_e1(cfg: RunConfig) -> tuple:
    cfg.validate()
    t = hochschild.normalized_e1_dims(cfg.d, cfg.p_max)
    entries = [{"p": p, "q": q, "dim": v, "total_degree": q - p} for (p, q), v in sorted(t.entries.items())]
    rep = hochschild.check_above_diagonal(cfg.d, cfg.p_max)
    payload = {"d": cfg.d, "page": "N-E1", "p_max": cfg.p_max, "entries": entries, "above_diagonal": rep.passed}
    return _table_output(payload, "entries", ["p", "q", "dim"], cfg.output_format), EXIT_OK


def cmd_parity(cfg: RunConfig) -> tuple:
    cfg.validate()
    rep = hochschild.parity_compare(cfg.d, cfg.d + 2, cfg.p_max)
    payload = rep.as_dict()
    return _render_json(payload), EXIT_OK if rep.passed else EXIT_FAIL


def cmd_fans(cfg: RunConfig) -> tuple:
    P = fans.enumerate_fans(cfg.n)
    payload = {
        "n": cfg.n,
        "count": len(P),
        "fans": [{"fan": T.to_string(), "theta": sorted(fans.theta(T)), "bead_arity": T.bead_arity()} for T in P.objects],
        "covers": [{"source": P.objects[a].to_string(), "target": P.objects[b].to_string(), "edge": e} for a, b, e in P.covers],
        "cyclohedron_f_vector": fans.cyclohedron_f_vector(cfg.n),
    }
    if cfg.output_format == "json":
        return _render_json(payload), EXIT_OK
    rows = payload["fans"]
    for r in rows:
        r["theta"] = " ".join(map(str, r["theta"]))
    return _render_rows(rows, ["fan", "theta", "bead_arity"], cfg.output_format), EXIT_OK


def cmd_graphcx(cfg: RunConfig) -> tuple:
    if cfg.d < 3:
        raise UsageError(f"--d must be >= 3 (got {cfg.d})")
    q_max = cfg.q_max if cfg.q_max is not None else 3
    window = graphcx.closed_window(cfg.n, cfg.d, q_max)
    degree_max = window if cfg.degree_max is None else cfg.degree_max
    if degree_max > window:
        raise graphcx.WindowNotClosed(f"degrees above {window} need q_max > {q_max}")
    coh = graphcx.graph_cohomology(cfg.n, cfg.d, degree_max, q_max)
    conf = confalg.stirling_dims(cfg.n)
    expected = {k * (cfg.d - 1): v for k, v in enumerate(conf)}
    rows = [{"degree": i, "dim": coh[i], "conf_dim": expected.get(i, 0)} for i in range(degree_max + 1)]
    ok = all(r["dim"] == r["conf_dim"] for r in rows)
    payload = {"n": cfg.n, "d": cfg.d, "q_max": q_max, "closed_window": window, "rows": rows, "matches_conf": ok}
    return _table_output(payload, "rows", ["degree", "dim", "conf_dim"], cfg.output_format), EXIT_OK


def cmd_fanic_verify(cfg: RunConfig) -> tuple:
    cfg.validate()
    r = _fanic_checks(cfg.d, cfg.n)
    return _render_json(r), EXIT_OK if r["passed"] else EXIT_FAIL


def cmd_limp_compare(cfg: RunConfig) -> tuple:
    cfg.validate(min_d=4)
    r = _limp_checks(cfg.d, cfg.n)
    return _render_json(r), EXIT_OK if r["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# verification suites


def _check(name: str, passed: bool, **details) -> Dict[str, object]:
    return {"name": name, "passed": bool(passed), "details": details}


def _fanic_checks(d: int, n: int) -> Dict[str, object]:
    mu = fanic.ass_to_poisson(d, max(n + 2, 3))
    checks = [
        _check("operad-axioms", not mu.target.check_axioms(), failures=mu.target.check_axioms()[:3]),
        _check("morphism", not mu.check(), failures=mu.check()[:3]),
        _check("multiplicative", not mu.check_multiplicative(), failures=mu.check_multiplicative()),
    ]
    for m in range(n + 1):
        rep = fanic.verify_functoriality(fanic.build_fanic(mu, m))
        checks.append(_check(f"functoriality n={m}", rep.passed, squares=rep.checked, failures=rep.failures[:1]))
        ident = fanic.identity_morphism(fanic.associative_operad(max(m + 2, 3)))
        rep = fanic.verify_functoriality(fanic.build_fanic(ident, m))
        checks.append(_check(f"functoriality ASS n={m}", rep.passed, squares=rep.checked, failures=rep.failures[:1]))
        rep = fanic.verify_fanic_vs_truncation(mu, m)
        checks.append(_check(f"fanic-vs-truncation n={m}", rep.passed, checked=rep.checked, failures=rep.failures[:1]))
    for m in range(min(n, 2) + 1):
        dims = fanic.holim_fanic_dims(mu, m)
        ok = all(a == b for a, b in dims.values())
        checks.append(_check(f"holim n={m}", ok, dims={str(k): {"fanic": a, "truncation": b} for k, (a, b) in dims.items()}))
    return {"suite": "fanic", "d": d, "n": n, "passed": all(c["passed"] for c in checks), "checks": checks}


def _limp_checks(d: int, n: int) -> Dict[str, object]:
    checks = []
    for m in range(min(n, 3) + 1):
        for k in range(m + 1):
            X = hochschild.homology_cosimplicial(d, m, k)
            lim = cosimp.lim_p(X.restrict(m), m + 1)
            trunc = homology_dims(cosimp.truncate_cochain(cosimp.conormalize(X), m))
            trunc = trunc + [0] * (len(lim) - len(trunc))
            checks.append(_check(f"truncation lemma n={m} k={k}", lim == trunc, lim=lim, truncation=trunc))
    for m in range(min(n, 2) + 1):
        diags = {k: hochschild.homology_cosimplicial(d, m, k).restrict(m) for k in range(m + 1)}
        rep = cosimp.cofinal_compare(diags, fanic.phi_functor(m), m + 1, m)
        checks.append(_check(f"cofinal comparison n={m}", rep.passed, grades=rep.as_dict()["grades"]))
    return {"suite": "cosimp", "d": d, "n": n, "passed": all(c["passed"] for c in checks), "checks": checks}


def _suite_hochschild(cfg: RunConfig) -> List[Dict[str, object]]:
    d, p_max = cfg.d, cfg.p_max
    checks = []
    for dd in sorted({d, 3, 4, 5}):
        try:
            hochschild.e1_complex(dd, p_max)
            checks.append(_check(f"delta^2=0 d={dd}", True, p_max=p_max))
        except Exception as exc:  # NotAComplex
            checks.append(_check(f"delta^2=0 d={dd}", False, error=str(exc)))
    for dd in sorted({d, 4, 5}):
        page = hochschild.e2_page(dd, max(p_max, 3))
        col2 = {q: v for (p, q), v in page.entries.items() if p == 2}
        col1 = {q: v for (p, q), v in page.entries.items() if p == 1}
        ok = page.get(0, 0) == 1 and not col1 and col2 == {dd - 1: 1}
        checks.append(_check(f"E2 low columns d={dd}", ok, column1=sorted(col1.items()), column2=sorted(col2.items())))
    for dd in sorted({d, 4, 5}):
        rep = hochschild.check_above_diagonal(dd, p_max)
        checks.append(_check(f"above diagonal d={dd}", rep.passed, failures=rep.failures[:3]))
    rep = hochschild.parity_compare(d, d + 2, p_max)
    checks.append(_check(f"parity d={d} vs d={d + 2}", rep.passed, failures=rep.failures[:3]))
    if d >= 4:
        deg = _degree_for_pmax(d, p_max)
        try:
            bar, emb = hochschild.knot_betti_table(d, deg, p_max=p_max)
            prod = emb * hochschild.loop_sphere_series(d, deg)
            ok = prod.as_list() == bar.as_list() and all(c >= 0 for c in emb.as_list())
            checks.append(_check(f"splitting d={d}", ok, emb_bar=bar.as_list(), emb=emb.as_list()))
        except hochschild.SeriesDivisionFailure as exc:
            checks.append(_check(f"splitting d={d}", False, error=str(exc)))
    # modular cross-check on the same matrices
    bad = []
    parity = d % 2
    for p in range(p_max):
        for k in range(p_max):
            m = hochschild.coface_alternating_sum(p, k, parity)
            mr = two_prime_rank(m, seed=cfg.seed)
            if not (mr.agree and mr.rank == rank(m)):
                bad.append({"p": p, "k": k})
    checks.append(_check(f"two-prime ranks d={d}", not bad, disagreements=bad[:1]))
    return checks


def _suite_fans(cfg: RunConfig) -> List[Dict[str, object]]:
    checks = []
    for m in range(cfg.n + 1):
        P = fans.enumerate_fans(m)
        # faces of the m-dimensional cyclohedron: 1, 3, 13, 63, ...
        ok = len(P) == sum(fans.cyclohedron_f_vector(m))
        checks.append(_check(f"|Phi[{m}]|", ok, count=len(P)))
        mono = all(fans.theta(P.objects[a]) <= fans.theta(P.objects[b]) for a, b in P.relations())
        checks.append(_check(f"theta monotone n={m}", mono))
        bead = all(T.bead_arity() == len(fans.theta(T)) - 1 for T in P.objects)
        checks.append(_check(f"bead arity n={m}", bead))
        th = fans.check_cofinality("theta", m)
        checks.append(_check(f"theta overcategories acyclic n={m}", th.passed, failing=th.failing()[:1]))
        # informational: terminal objects exist only for n <= 1 (see README)
        missing = [t["target"] for t in th.targets if t["terminal"] is None]
        checks.append({"name": f"theta terminal objects n={m}", "passed": True, "informational": True,
                       "details": {"all_terminal": th.all_terminal, "without_terminal": missing}})
        if m <= 2 or not cfg.quick:
            ph = fans.check_cofinality("phi", m)
            checks.append(_check(f"phi overcategories acyclic n={m}", ph.passed, failing=ph.failing()[:1]))
    return checks


def _suite_graphcx(cfg: RunConfig) -> List[Dict[str, object]]:
    checks = []
    for d in (4, 5):
        bad = 0
        for n in range(1, 4):
            for q in range(3):
                for e in range(math.comb(n + q, 2) + 1):
                    for g in graphcx.graphs_with(n, q, e, d % 2):
                        x = graphcx.GraphClass.of(g, d)
                        if not graphcx.differential(graphcx.differential(x)).is_zero():
                            bad += 1
        checks.append(_check(f"graph d^2=0 d={d}", bad == 0, failures=bad))
    for d, q_max in ((4, 3), (5, 5)):
        for n in range(1, 4):
            w = graphcx.closed_window(n, d, q_max)
            coh = graphcx.graph_cohomology(n, d, w, q_max)
            conf = {k * (d - 1): v for k, v in enumerate(confalg.stirling_dims(n))}
            ok = all(coh[i] == conf.get(i, 0) for i in range(w + 1))
            checks.append(_check(f"graph cohomology n={n} d={d}", ok, window=w, dims=[coh[i] for i in range(w + 1)]))
    for d in (3, 4, 5):
        for n in range(1, 5):
            rep = graphcx.check_degree_bound(n, d, 2)
            checks.append(_check(f"degree bound n={n} d={d}", rep.passed, checked=rep.checked))
    for d in (4, 5):
        t = graphcx.GraphClass.of(graphcx.tripod(d), d)
        checks.append(_check(f"I-bar of d(tripod) d={d}", graphcx.i_bar(graphcx.differential(t)).is_zero()))
    return checks


def _suite_fanic(cfg: RunConfig) -> List[Dict[str, object]]:
    n = 2 if cfg.quick else 3
    out = []
    for d in (3, 4):
        r = _fanic_checks(d, n)
        out.extend({**c, "name": f"d={d} {c['name']}"} for c in r["checks"])
    return out


def _suite_cosimp(cfg: RunConfig) -> List[Dict[str, object]]:
    n = 2 if cfg.quick else 3
    checks = list(_limp_checks(4, n)["checks"])
    X = cosimp.CosimplicialVS.constant(3)
    N = cosimp.conormalize(X)
    checks.append(_check("constant conormalization", list(N.spaces) == [1, 0, 0, 0]))
    for k in range(3):
        X = hochschild.homology_cosimplicial(4, 4, k)
        a = homology_dims(cosimp.conormalize(X))[:4]
        b = homology_dims(cosimp.moore_complex(X))[:4]
        checks.append(_check(f"normalization theorem k={k}", a == b, normalized=a, unnormalized=b))
    return checks


_SUITES: Dict[str, Callable[[RunConfig], List[Dict[str, object]]]] = {
    "hochschild": _suite_hochschild,
    "fans": _suite_fans,
    "graphcx": _suite_graphcx,
    "fanic": _suite_fanic,
    "cosimp": _suite_cosimp,
}


def cmd_verify(suite: str, cfg: RunConfig) -> tuple:
    cfg.validate()
    names = sorted(_SUITES) if suite == "all" else [suite]
    if suite == "all" and cfg.quick:
        cfg.p_max = min(cfg.p_max, 5)
        cfg.n = min(cfg.n, 2)
    results = []
    for name in names:
        checks = _SUITES[name](cfg)
        results.append({"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks})
    passed = all(r["passed"] for r in results)
    first = None
    for r in results:
        for c in r["checks"]:
            if not c["passed"] and first is None:
                first = {"suite": r["suite"], **c}
    payload = {
        "suite": suite, "passed": passed, "quick": cfg.quick, "seed": cfg.seed,
        "d": cfg.d, "p_max": cfg.p_max, "n": cfg.n, "results": results, "first_failure": first,
    }
    return _render_json(payload), EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, **defaults) -> None:
    p.add_argument("--d", type=int, default=defaults.get("d", 4))
    p.add_argument("--pmax", dest="p_max", type=int, default=defaults.get("p_max", 5))
    p.add_argument("--n", type=int, default=defaults.get("n", 2))
    p.add_argument("--degree-max", dest="degree_max", type=int, default=None)
    p.add_argument("--qmax", dest="q_max", type=int, default=None)
    p.add_argument("--format", dest="output_format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--prime-policy", dest="prime_policy", choices=("exact", "two-prime"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quick", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="longknots", description="Hochschild homology of the Poisson operad and supporting combinatorics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("e2", "E2 page of the Hochschild spectral sequence"),
        ("knots", "Betti numbers of long knot spaces"),
        ("normalized-e1", "normalised E1 page and the above-diagonal check"),
        ("parity", "compare E2 for d and d + 2"),
        ("fans", "enumerate the fan poset Phi[n]"),
        ("graphcx", "cohomology of the admissible graph complex"),
        ("fanic-verify", "check fanic diagrams of ASS -> POISS"),
        ("limp-compare", "derived limits over Delta[n] and Phi[n]"),
    ):
        _common(sub.add_parser(name, help=helptext))
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    _common(v)
    return parser


_COMMANDS = {
    "e2": cmd_e2,
    "knots": cmd_knots,
    "normalized-e1": cmd_normalized_e1,
    "parity": cmd_parity,
    "fans": cmd_fans,
    "graphcx": cmd_graphcx,
    "fanic-verify": cmd_fanic_verify,
    "limp-compare": cmd_limp_compare,
}

_RESOURCE_ERRORS = (hochschild.RangeExceeded, fans.ResourceBound, graphcx.ResourceBound, graphcx.WindowNotClosed)


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(
        d=args.d, p_max=args.p_max, degree_max=args.degree_max, n=args.n, q_max=args.q_max,
        output_format=args.output_format, prime_policy=args.prime_policy, seed=args.seed,
        jobs=args.jobs, quick=args.quick,
    )
    try:
        if args.command == "verify":
            out, code = cmd_verify(args.suite, cfg)
        else:
            out, code = _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except _RESOURCE_ERRORS as exc:
        print(f"resource ceiling: {exc}", file=stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
