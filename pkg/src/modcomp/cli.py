"""Command line interface: ``modcomp <command> ...`` prints a JSON report.

Exit status: 0 for a definite result, 2 for INCONCLUSIVE, 1 for usage or
validation errors and UNSUPPORTED queries.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import companion as cp
from . import gl2, modsym, tame
from .formats import EigenformError, eigenform_to_dict, emit_report, load_eigenform
from .witt import WittRing

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; ours must exit with 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError("%s: error: %s" % (self.prog, message))


def _parse_matrix(text: str):
    vals = [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    if len(vals) != 4:
        raise UsageError("a matrix is four integers a,b,c,d (got %r)" % text)
    return [[vals[0], vals[1]], [vals[2], vals[3]]]


# --------------------------------------------------------------------------
# commands; each returns (inputs, result, caveats, exit code)

def cmd_msym_dims(a):
    cusp = modsym.build_space(a.k, a.N, cuspidal=True)
    amb = modsym.build_space(a.k, a.N, cuspidal=False)
    d = modsym.dim_formula(a.k, a.N)
    res = {"ambient_dim": amb.dim, "cuspidal_dim": cusp.dim, "cusp_forms_dim": d,
           "check": cusp.dim == 2 * d}
    return {"k": a.k, "N": a.N}, res, [], EXIT_OK if res["check"] else EXIT_ERROR


def cmd_msym_eigenforms(a):
    s = modsym.rational_eigenforms(a.k, a.N, a.bound)
    res = {
        "newforms": [eigenform_to_dict(f) for f in s.newforms],
        "oldforms": [{"form": f.label, "multiplicity": m} for f, m in s.oldforms],
        "nonrational_blocks": [{"dim": d, "charpolys": {str(q): c for q, c in cps}}
                               for d, cps in s.nonrational],
    }
    cav = ["non-rational newform blocks are reported only by their characteristic polynomials"] \
        if s.nonrational else []
    return {"k": a.k, "N": a.N, "bound": a.bound}, res, cav, EXIT_OK


def _verdict_code(v):
    return {cp.FOUND: EXIT_OK, cp.RULED_OUT: EXIT_OK, cp.INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(v, EXIT_ERROR)


def cmd_companion_search(a):
    f = load_eigenform(a.input)
    r = cp.companion_search(f, a.p, a.n, a.bound)
    inputs = {"input": a.input, "form": f.label, "p": a.p, "n": a.n, "bound": a.bound}
    d = r.to_dict()
    cav = d.pop("caveats")
    return inputs, d, cav, _verdict_code(r.verdict)


def cmd_greenberg(a):
    f = load_eigenform(a.input)
    g = cp.greenberg_report(f, a.p, a.nmax, a.bound)
    d = g.to_dict()
    cav = d.pop("caveats")
    verdicts = [r.verdict for r in g.reports]
    if cp.UNSUPPORTED in verdicts:
        code = EXIT_ERROR
    elif cp.INCONCLUSIVE in verdicts or len(verdicts) < a.nmax:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    return {"input": a.input, "form": f.label, "p": a.p, "nmax": a.nmax, "bound": a.bound}, d, cav, code


def _ring(a):
    return WittRing(a.p, a.n, a.f)


def cmd_lab_h1(a):
    ring = _ring(a)
    G = gl2.sl2_group(ring) if a.group == "sl2" else gl2.gl2_group(ring)
    twists = a.twist if a.twist else [0]
    dims = {str(i): gl2.h1_dimension(G, i, pairs=a.pairs) for i in twists}
    inputs = {"group": a.group, "p": a.p, "n": a.n, "f": a.f, "twists": twists, "pairs": a.pairs}
    return inputs, {"order": G.order, "h1_dim": dims}, [], EXIT_OK


def cmd_lab_closure(a):
    ring = _ring(a)
    mats = [_parse_matrix(g) for g in a.gen] if a.gen else [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]
    G = gl2.subgroup_closure([gl2.mat(ring, m) for m in mats], ring)
    q = a.p ** a.f
    sl2_order = q * (q * q - 1) * q ** (3 * (a.n - 1))
    res = {"order": G.order, "sl2_order": sl2_order, "contains_sl2": gl2.contains_sl2(G)}
    return {"p": a.p, "n": a.n, "f": a.f, "generators": mats}, res, [], EXIT_OK


def cmd_lab_tame(a):
    params = tame.TameParams(a.p, a.q, a.alpha, a.ring)
    lifts = tame.enumerate_lifts(params)
    rep = tame.match_versal(params, lifts)
    res = rep.to_dict()
    if a.ring == "dual":
        res["tangent_dim"] = tame.tangent_dimension(params, lifts)
    res["tau_power_check"] = all(tame.check_tau_power(params, x) for x in lifts)
    inputs = {"p": a.p, "q": a.q, "alpha": a.alpha, "ring": a.ring}
    code = EXIT_OK if rep.match is not False else EXIT_ERROR
    return inputs, res, list(rep.notes), code


def cmd_lab_hpoly(a):
    h = gl2.h_poly(a.n)
    res = {"n": a.n, "coefficients": list(h.coeffs), "poly": str(h), "value_at_2": h(2)}
    return {"n": a.n}, res, [], EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    P = _Parser(prog="modcomp", description=__doc__.splitlines()[0])
    sub = P.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ms = sub.add_parser("msym", help="modular symbol spaces")
    mss = ms.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = mss.add_parser("dims", help="dimensions of the ambient and cuspidal spaces")
    x.add_argument("--k", type=int, required=True)
    x.add_argument("--N", type=int, required=True)
    x.set_defaults(func=cmd_msym_dims, name="msym dims")
    x = mss.add_parser("eigenforms", help="rational newforms with q-expansions")
    x.add_argument("--k", type=int, required=True)
    x.add_argument("--N", type=int, required=True)
    x.add_argument("--bound", type=int, default=50)
    x.set_defaults(func=cmd_msym_eigenforms, name="msym eigenforms")

    c = sub.add_parser("companion", help="companion forms")
    cs = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = cs.add_parser("search", help="search for a companion mod p^n")
    x.add_argument("--input", required=True, help="eigenform JSON (bundled names are accepted)")
    x.add_argument("--p", type=int, required=True)
    x.add_argument("--n", type=int, required=True)
    x.add_argument("--bound", type=int)
    x.set_defaults(func=cmd_companion_search, name="companion search")

    x = sub.add_parser("greenberg", help="companion search for n = 1..nmax and the splitting summary")
    x.add_argument("--input", required=True)
    x.add_argument("--p", type=int, required=True)
    x.add_argument("--nmax", type=int, required=True)
    x.add_argument("--bound", type=int)
    x.set_defaults(func=cmd_greenberg, name="greenberg")

    lab = sub.add_parser("lab", help="finite group and deformation checks")
    ls = lab.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("h1", cmd_lab_h1), ("closure", cmd_lab_closure)):
        x = ls.add_parser(name)
        x.add_argument("--p", type=int, required=True)
        x.add_argument("--n", type=int, default=1)
        x.add_argument("--f", type=int, default=1, help="residue degree")
        x.set_defaults(func=func, name="lab " + name)
        if name == "h1":
            x.add_argument("--group", choices=("gl2", "sl2"), default="gl2")
            x.add_argument("--twist", type=int, action="append", help="repeatable")
            x.add_argument("--pairs", choices=("all", "generators"), default="all")
        else:
            x.add_argument("--gen", action="append", help="generator a,b,c,d (repeatable)")
    x = ls.add_parser("tame")
    x.add_argument("--p", type=int, required=True)
    x.add_argument("--q", type=int, required=True)
    x.add_argument("--alpha", type=int, required=True)
    x.add_argument("--ring", choices=("zp2", "zp3", "dual"), default="zp2")
    x.set_defaults(func=cmd_lab_tame, name="lab tame")
    x = ls.add_parser("hpoly")
    x.add_argument("--n", type=int, required=True)
    x.set_defaults(func=cmd_lab_hpoly, name="lab hpoly")
    return P


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as e:      # --help
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR
    t0 = time.perf_counter()
    try:
        inputs, result, caveats, code = a.func(a)
    except (EigenformError, FileNotFoundError, ValueError, UsageError,
            gl2.ClosureCapExceeded, tame.LiftCapExceeded, modsym.BudgetExceeded) as e:
        doc = {"format": "modcomp-report/1", "command": a.name, "error": str(e)}
        if isinstance(e, EigenformError) and e.index is not None:
            doc["index"] = e.index
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_ERROR
    out.write(emit_report(a.name, inputs, result, caveats,
                          timing={"seconds": round(time.perf_counter() - t0, 3)}))
    return code


if __name__ == "__main__":
    sys.exit(main())
