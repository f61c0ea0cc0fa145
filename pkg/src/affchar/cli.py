"""Command-line entry point: ``affchar <subcommand> ...``.

Every subcommand forwards to one library call and prints either a short text
rendering or, with ``--json``, a JSON document with sorted keys in which all
rationals are "num/den" strings.

Exit status: 0 on success, 1 when a verification fails, 2 on bad flags.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .series import BiSeries, QSeries, rat_str
from .weights import Level

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_qmax() -> int:
    raw = os.environ.get("AFFCHAR_QMAX_DEFAULT", "10")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"AFFCHAR_QMAX_DEFAULT must be an integer, got {raw!r}")
    if value < 0:
        raise UsageError("AFFCHAR_QMAX_DEFAULT must be non-negative")
    return value


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _plain(x: Any) -> Any:
    """Recursively replace Fractions by "num/den" and tuples by lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return rat_str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if hasattr(x, "to_json"):
        return _plain(x.to_json())
    return str(x)


def dump(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False)


def _exp(e: Fraction) -> str:
    return str(e) if e.denominator == 1 else f"({e})"


def series_text(s, limit: int = 12) -> str:
    """Leading terms of a QSeries or BiSeries, one monomial per term."""
    if isinstance(s, QSeries):
        parts = [f"{c}*q^{_exp(Fraction(e))}" for e, c in list(s.terms())[:limit]]
        more = " + ..." if len(list(s.terms())) > limit else ""
        return (" + ".join(parts) or "0") + more + f"   [q <= {s.top}]"
    parts = [f"{c}*q^{_exp(Fraction(qe))}*z^{_exp(Fraction(ze))}" for qe, ze, c in list(s.terms())[:limit]]
    more = " + ..." if len(list(s.terms())) > limit else ""
    return (" + ".join(parts) or "0") + more + f"   [q <= {s.q_top}, z in [{s.z_lo}, {s.z_hi}]]"


def series_json(s) -> dict:
    if isinstance(s, (QSeries, BiSeries)):
        out = s.to_json()
        out["type"] = "QSeries" if isinstance(s, QSeries) else "BiSeries"
        return out
    return _plain(s)


def vector_json(vec) -> list:
    from .uea import gen_str
    return [{"monomial": [gen_str(g) for g in w], "coeff": rat_str(c)} for w, c in sorted(vec.items())]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _level(a) -> Level:
    try:
        return Level(a.p, a.pp)
    except ValueError as exc:
        raise UsageError(str(exc))


def _qmax(a) -> int:
    return default_qmax() if a.qmax is None else a.qmax


def _window(a):
    from .characters import DEFAULT_Z_WINDOW
    lo = DEFAULT_Z_WINDOW[0] if a.zmin is None else Fraction(a.zmin)
    hi = DEFAULT_Z_WINDOW[1] if a.zmax is None else Fraction(a.zmax)
    return lo, hi


def cmd_kac_table(a) -> int:
    from .weights import kac_quadrants, render_kac_table
    lev = _level(a)
    if a.json:
        upper, lower = kac_quadrants(lev, a.rmax, a.smin, a.smax)
        rows = [{"r": e.r, "s": e.s, "j": e.j, "h": e.h, "irreducible": e.irreducible,
                 "admissible": e.admissible} for e in upper + lower]
        print(dump({"p": lev.p, "pp": lev.pp, "k": lev.k, "entries": rows}))
    else:
        print(render_kac_table(lev, a.rmax, a.smin, a.smax))
    return EXIT_OK


def _descriptor(a, lev):
    from .structure import staggered_descriptor
    if a.conj is None or a.params is None:
        raise UsageError("staggered modules need --conj and --params")
    plus, minus = staggered_descriptor(lev, a.conj, [int(x) for x in a.params.split(",")])
    return plus if a.sign == "+" else minus


def cmd_char(a) -> int:
    from . import characters as C
    q = _qmax(a)
    kind = a.kind
    if kind == "string":
        res = C.string_function(a.n, a.l, a.m, q_max=q)
    elif kind == "integer":
        res = C.integer_level_char(a.n, a.rho, q, _window(a))
    elif kind == "virasoro":
        res = C.virasoro_kac_char(a.p, a.pp, a.r, a.s, q)
    elif kind == "super":
        res = C.superconformal_kac_char(a.p, a.pp, a.r, a.s, q)
    else:
        lev = _level(a)
        if kind == "verma":
            j = Fraction(a.j) if a.j is not None else C.j_rs(lev, a.r, a.s)
            res = C.verma_char(lev, j, q, _window(a))
        elif kind == "kac":
            res = C.kac_char(lev, a.r, a.s, q, _window(a))
        elif kind == "irr":
            res = C.irr_char(lev, a.r, a.s, q, _window(a))
        elif kind == "admissible":
            cf = C.admissible_closed(lev, a.r, a.s)
            res = cf.expand(C.leading_exponent(lev, C.j_rs(lev, a.r, a.s)) + q, _window(a))
        else:
            desc = _descriptor(a, lev)
            cf = C.staggered_closed(lev, desc)
            res = C.staggered_char(lev, desc, cf.lowest() + q, _window(a))
    if isinstance(res, C.SuperChar):
        if a.json:
            print(dump({"kind": kind, "kappa": res.kappa,
                        "parts": [series_json(x) for x in res.parts]}))
        else:
            print(f"kappa = {res.kappa}")
            for i, part in enumerate(res.parts):
                print(f"P{i}: {series_text(part)}")
        return EXIT_OK
    print(dump({"kind": kind, "series": series_json(res)}) if a.json else series_text(res))
    return EXIT_OK


def cmd_decompose(a) -> int:
    from .characters import kac_decompose
    lev = _level(a)
    factors = kac_decompose(lev, a.r, a.s)
    if a.json:
        print(dump({"r": a.r, "s": a.s, "factors": [{"label": list(l), "multiplicity": m}
                                                    for l, m in factors]}))
    else:
        print(f"A[{a.r},{a.s}] = " + " + ".join(
            (f"{m}*" if m != 1 else "") + f"L[{l[0]},{l[1]}]" for l, m in factors))
    return EXIT_OK


def cmd_loewy(a) -> int:
    from .structure import kac_loewy, render_text, staggered_loewy, verma_loewy
    lev = _level(a)
    if a.kind == "kac":
        d = kac_loewy(lev, a.r, a.s)
    elif a.kind == "verma":
        d = verma_loewy(lev, a.r, a.s, a.depth)
    else:
        d = staggered_loewy(lev, _descriptor(a, lev))
    print(dump(d) if a.json else render_text(d))
    return EXIT_OK


def cmd_branch(a) -> int:
    from .branching import BranchingKey, branching_alt, branching_function, verify_branching
    lev = _level(a)
    q = _qmax(a)
    if a.action == "verify":
        rep = verify_branching(lev, a.n, a.r, a.s, a.rho, q)
        if a.json:
            print(dump(rep))
        else:
            status = "PASS" if rep.ok else "FAIL"
            print(f"{status} branching identity {lev} n={a.n} (r,s)=({a.r},{a.s}) rho={a.rho} "
                  f"q<={rep.q_top}: {rep.compared} coefficients, sigma in {rep.sigmas}")
            if rep.first_difference is not None:
                print(f"first difference at {rep.first_difference}")
        return EXIT_OK if rep.ok else EXIT_FAIL
    if a.sigma is None:
        raise UsageError("branch fn needs --sigma")
    key = BranchingKey(lev, a.n, a.r, a.s, a.rho, a.sigma)
    fn = branching_alt if a.alt else branching_function
    res = fn(key, q_max=q)
    print(dump({"key": {"p": lev.p, "pp": lev.pp, "n": a.n, "r": a.r, "s": a.s,
                         "rho": a.rho, "sigma": a.sigma}, "route": "alt" if a.alt else "string", "series": series_json(res)})
          if a.json else series_text(res))
    return EXIT_OK


def cmd_phi(a) -> int:
    from . import residue as R
    from .characters import admissible_closed, irr_closed, kac_closed, staggered_closed
    lev = _level(a)
    q = _qmax(a)
    target = a.module
    if a.kind == "char":
        if target == "kac":
            cf = kac_closed(lev, a.r, a.s)
        elif target == "irr":
            cf = irr_closed(lev, a.r, a.s)
        elif target == "admissible":
            cf = admissible_closed(lev, a.r, a.s)
        else:
            cf = staggered_closed(lev, _descriptor(a, lev))
        res = R.phi_char(cf, q_max=q)
        print(dump({"phi": cf.name, "series": series_json(res)}) if a.json else series_text(res))
        return EXIT_OK
    if target == "kac":
        img = R.phi_kac(lev, a.r, a.s)
    elif target in ("irr", "admissible"):
        img = R.phi_irreducible(lev, a.r, a.s)
    else:
        img = R.phi_staggered(lev, _descriptor(a, lev))
    print(dump(img) if a.json else img.render())
    return EXIT_OK


def cmd_singular(a) -> int:
    from .uea import Module, find_singular, normalize, singular_vector, vec_str
    lev = _level(a)
    j = Fraction(a.j)
    mod = Module(lev, j)
    for jq in a.quotient or []:
        mod.add_relation(singular_vector(lev, j, Fraction(jq), module=mod, how="pbw"))
    vecs = [normalize(v) for v in find_singular(lev, j, a.charge, a.grade, module=mod)]
    if a.json:
        print(dump({"p": lev.p, "pp": lev.pp, "j": j, "charge": a.charge, "grade": a.grade,
                    "quotient": [Fraction(x) for x in a.quotient or []],
                    "normalization": "unit coefficient on the PBW-largest monomial",
                    "dimension": len(vecs), "basis": [vector_json(v) for v in vecs]}))
    else:
        print(f"singular vectors of weight (Q,N)=({a.charge},{a.grade}) in V_{j}"
              + (f" / <{', '.join(a.quotient)}>" if a.quotient else "") + f": {len(vecs)}")
        for v in vecs:
            print("  " + vec_str(v))
    return EXIT_OK


def cmd_staggered_beta(a) -> int:
    from .uea import EXAMPLES, StaggeredExample, staggered_solve
    if a.example in EXAMPLES:
        ex = EXAMPLES[a.example]
    else:
        try:
            with open(a.example, encoding="utf-8") as fh:
                ex = StaggeredExample.from_dict(json.load(fh))
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read example {a.example!r}: {exc}")
    res = staggered_solve(ex)
    if a.json:
        print(dump(res))
    else:
        print(f"example {ex.name}: {ex.description}")
        if not res.consistent:
            print(res.message or "no staggered module with this data")
        else:
            print(f"eta = {res.eta}, mu = {res.mu}")
            if res.D:
                print(f"J-_1 R = {vec_str_safe(res.D)}")
            if res.E:
                print(f"J+_0 R = {vec_str_safe(res.E)}")
            print(f"beta = {res.beta}" if res.beta_defined else "beta undefined (S = 1)")
            print(f"normalization: {res.normalization}")
    return EXIT_OK if res.consistent else EXIT_FAIL


def vec_str_safe(v) -> str:
    from .uea import vec_str
    return vec_str(v)


def cmd_verify_all(a) -> int:
    from .acceptance import CRITERIA, run
    only: Optional[List[int]] = None
    if a.only:
        try:
            only = [int(x) for x in a.only.split(",")]
        except ValueError:
            raise UsageError("--only takes a comma-separated list of criterion numbers")
        unknown = [x for x in only if x not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    results = run(only, jobs=a.jobs)
    if a.json:
        print(dump({"results": [r.to_json() for r in results],
                    "pass": all(r.passed for r in results)}))
    else:
        for r in results:
            print(r.line() if a.timings else r.line().replace(f" [{r.seconds:.2f}s]", ""))
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_level(p, required: bool = True):
    p.add_argument("--p", type=int, required=required)
    p.add_argument("--pp", type=int, required=required, help="p' (coprime to p)")


def _add_common(p):
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_series(p):
    p.add_argument("--qmax", type=int, default=None,
                   help="grades above the leading term (default $AFFCHAR_QMAX_DEFAULT or 10)")
    p.add_argument("--zmin", default=None)
    p.add_argument("--zmax", default=None)


def _add_staggered(p):
    p.add_argument("--conj", type=int, choices=(1, 2, 3))
    p.add_argument("--params", help="comma-separated: a,s0,ell | r0,b,ell | b,ell")
    p.add_argument("--sign", choices=("+", "-"), default="+")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="affchar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kac-table", help="extended affine Kac table")
    _add_level(p)
    p.add_argument("--rmax", type=int, default=6)
    p.add_argument("--smin", type=int, default=-5)
    p.add_argument("--smax", type=int, default=5)
    _add_common(p)
    p.set_defaults(func=cmd_kac_table)

    p = sub.add_parser("char", help="expand a character")
    p.add_argument("--kind", required=True, choices=("verma", "kac", "irr", "admissible", "staggered",
                                                     "string", "integer", "virasoro", "super"))
    _add_level(p, required=False)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--j")
    p.add_argument("--n", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--rho", type=int)
    _add_staggered(p)
    _add_series(p)
    _add_common(p)
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("decompose", help="irreducible factors of an affine Kac module")
    _add_level(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("loewy", help="Loewy diagram")
    _add_level(p)
    p.add_argument("--kind", choices=("kac", "verma", "staggered"), default="kac")
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--depth", type=int, default=3)
    _add_staggered(p)
    _add_common(p)
    p.set_defaults(func=cmd_loewy)

    p = sub.add_parser("branch", help="branching functions and the branching identity")
    p.add_argument("action", choices=("verify", "fn"))
    _add_level(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--sigma", type=int)
    p.add_argument("--alt", action="store_true", help="use the H_i route for 'fn'")
    p.add_argument("--qmax", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("phi", help="the residue map on characters or modules")
    p.add_argument("--kind", choices=("char", "module"), default="char")
    p.add_argument("--module", choices=("kac", "irr", "admissible", "staggered"), default="kac")
    _add_level(p)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    _add_staggered(p)
    p.add_argument("--qmax", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("singular", help="singular vectors by kernel search")
    _add_level(p)
    p.add_argument("--j", required=True)
    p.add_argument("--charge", type=int, required=True)
    p.add_argument("--grade", type=int, required=True)
    p.add_argument("--quotient", nargs="*", help="weights j' whose singular vectors are set to zero")
    _add_common(p)
    p.set_defaults(func=cmd_singular)

    p = sub.add_parser("staggered-beta", help="logarithmic coupling of a staggered module")
    p.add_argument("--example", required=True, help="I, II, conj3 or a JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_staggered_beta)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--jobs", type=int, default=1, help="run criteria in parallel processes")
    p.add_argument("--timings", action="store_true", help="include wall-clock times (not byte-stable)")
    _add_common(p)
    p.set_defaults(func=cmd_verify_all)
    return ap


_NEG_RATIONAL = re.compile(r"-\d+/\d+")


def _glue_negative_rationals(argv: Sequence[str]) -> List[str]:
    """argparse reads "--j -2/3" as two flags; rewrite it to "--j=-2/3"."""
    out: List[str] = []
    for tok in argv:
        if (_NEG_RATIONAL.fullmatch(tok) and out and out[-1].startswith("--")
                and "=" not in out[-1]):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = build_parser().parse_args(_glue_negative_rationals(argv))
        return args.func(args)
    except UsageError as exc:
        print(f"affchar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        # invalid labels, levels or parameter combinations
        print(f"affchar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
