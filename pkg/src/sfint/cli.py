"""Command-line front end: one subcommand per pipeline step plus a corpus runner."""

import argparse
import json
import os
import sys
import time
from importlib import resources

from .detsys import build_dx
from .pipeline import (
    ALL, EliminationFailed, SearchOptions, associated_1odes, compose_first_integral, gensol,
    hfunction, invade, pdeassol, sfunction_search, sfunction_sets, verify_first_integral,
)
from .pipeline.ode1 import D_MAX, HFunction
from .pipeline.search import SearchTrace, as_poly
from .pipeline.verify import (
    AllPointsDegenerate, ConstantResult, functionally_dependent, verify_compatibility,
)
from .symcore import Ode2, ParseError, parse_expr
from .symcore.expr import Mul, from_ratfunc, normalize, to_ratfunc
from .symcore.ratfunc import RatFunc

OK, FAILED, USAGE = 0, 1, 2
COMMANDS = ("dx", "sfunction", "exodes", "hfunction", "pdeassol", "invade", "gensol", "verify",
            "corpus")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input parsing


def parse_ode(text):
    """Ode2 from "z' = <expr>" (or "y'' = <expr>", or a bare right-hand side)."""
    if "=" in text:
        lhs, rhs = text.split("=", 1)
        if lhs.strip().replace(" ", "") not in ("z'", "y''"):
            raise UsageError(f"left-hand side must be z' or y'', got {lhs.strip()!r}")
    else:
        rhs = text
    return Ode2.from_phi(parse_expr(rhs))


def _choice(v):
    return ALL if v == ALL else int(v)


def ode_from_args(args):
    if args.ode is not None:
        if args.M is not None or args.N is not None:
            raise UsageError("give either --ode or --M/--N, not both")
        text = args.ode
        if os.path.isfile(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read().strip()
        return parse_ode(text)
    if args.M is None:
        raise UsageError("an ODE is required: --ode \"z' = ...\" or --M ... --N ...")
    return Ode2(args.M, args.N if args.N is not None else "1")


def options_from_args(args):
    return SearchOptions(
        sn=_choice(args.sn), deg=args.deg,
        den=as_poly(args.den) if args.den else None,
        sfun=to_ratfunc(parse_expr(args.sfun)) if args.sfun else None,
        en=_choice(args.en), max_deg_override=args.max_deg,
    )


def build_parser():
    p = argparse.ArgumentParser(prog="sfint", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--json", action="store_true", help="emit one JSON document")
        s.add_argument("--seed", type=int, default=0, help="sample-point RNG seed")
        s.add_argument("--precision", type=int, default=50, help="digits for numeric checks")
        if name == "corpus":
            s.add_argument("path", nargs="?", default=None,
                           help="newline-delimited JSON corpus (default: the shipped one)")
            continue
        s.add_argument("--ode", help="\"z' = <expr>\" or a file holding it")
        s.add_argument("--M", help="numerator polynomial of z'")
        s.add_argument("--N", help="denominator polynomial of z'")
        s.add_argument("--expr", help="expression operand (H, I, ...)")
        s.add_argument("--sn", default="1", choices=["1", "2", "3", ALL])
        s.add_argument("--en", default="1", choices=["1", "2", "3", ALL])
        s.add_argument("--deg", type=int)
        s.add_argument("--max-deg", dest="max_deg", type=int)
        s.add_argument("--den")
        s.add_argument("--sfun")
        s.add_argument("--dmax", type=int, default=D_MAX, help="Darboux degree bound")
    return p


# ---------------------------------------------------------------- subcommands


def cmd_dx(args, ode):
    if not args.expr:
        raise UsageError("dx needs --expr")
    out = build_dx(ode)(parse_expr(args.expr))
    return OK, {"dx": str(out)}


def cmd_sfunction(args, ode):
    opts = options_from_args(args)
    trace = SearchTrace()
    found = sfunction_search(ode, opts, trace)
    doc = {"s_functions": [{"k": k, "S": str(s)} for k, s in found], "attempts": trace.attempts}
    return (OK if found else FAILED), doc


def _sets(args, ode):
    sets = sfunction_sets(ode, options_from_args(args))
    if not sets:
        return None
    return sets[0]


def cmd_exodes(args, ode):
    sset = _sets(args, ode)
    if sset is None:
        return FAILED, {"s_functions": None, "associated_odes": []}
    doc = {"s_functions": {f"s{k}": None if sset.get(k) is None else str(sset.get(k))
                           for k in (1, 2, 3)},
           "associated_odes": [None if o is None else str(o) for o in associated_1odes(ode, sset)]}
    return OK, doc


def cmd_hfunction(args, ode):
    sset = _sets(args, ode)
    if sset is None:
        return FAILED, {"h_functions": []}
    opts = options_from_args(args)
    hs = []
    for k in opts.equations():
        if sset.get(k) is None:
            continue
        h = hfunction(ode, sset, k, args.dmax, args.seed)
        if h is not None:
            hs.append({"k": k, "H": str(h.expr), "strategy": h.strategy})
    return (OK if hs else FAILED), {"h_functions": hs}


def cmd_pdeassol(args, ode):
    opts = options_from_args(args)
    if opts.en == ALL:
        raise UsageError("pdeassol needs a single --en")
    k = opts.en
    if args.expr:
        h = HFunction(parse_expr(args.expr), k, "given")
    else:
        sset = _sets(args, ode)
        h = None if sset is None or sset.get(k) is None else hfunction(ode, sset, k, args.dmax,
                                                                       args.seed)
        if h is None:
            return FAILED, {"H": None, "reduced_ode": None, "F": None}
    try:
        red, f = pdeassol(ode, h, args.dmax, args.seed)
    except EliminationFailed as exc:
        return FAILED, {"H": str(h.expr), "reduced_ode": None, "F": None, "reason": str(exc)}
    doc = {"H": str(h.expr), "reduced_ode": str(red.ode), "eliminated": red.eliminated,
           "F": None if f is None else str(f)}
    if f is not None:
        try:
            doc["I"] = str(compose_first_integral(f, h.expr, args.seed))
        except ConstantResult:
            doc["I"] = None
    return (OK if f is not None else FAILED), doc


def cmd_invade(args, ode):
    rep = invade(ode, options_from_args(args), args.dmax, args.seed)
    return rep.exit, rep.to_json()


def cmd_gensol(args, ode):
    if args.expr:
        i = parse_expr(args.expr)
    else:
        rep = invade(ode, options_from_args(args), args.dmax, args.seed)
        if rep.first_integral is None:
            return FAILED, {"I": None, "general_solution": None}
        i = parse_expr(rep.first_integral)
    g = gensol(ode, i, args.dmax, args.seed)
    return (OK if g else FAILED), {"I": str(normalize(i)),
                                   "general_solution": None if g is None else g.to_json()}


def cmd_verify(args, ode):
    if not args.expr:
        raise UsageError("verify needs --expr")
    try:
        v = verify_first_integral(ode, parse_expr(args.expr), seed=args.seed, digits=args.precision)
    except AllPointsDegenerate as exc:
        return FAILED, {"passed": False, "reason": str(exc)}
    return (OK if v.passed else FAILED), v.to_json()


# ---------------------------------------------------------------- corpus


def default_corpus():
    return resources.files("sfint").joinpath("data/corpus.jsonl")


def load_corpus(path):
    """Entries of a newline-delimited JSON corpus; raises ValueError on bad data."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    entries, seen = [], set()
    for no, line in enumerate(lines, 1):
        try:
            e = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {no}: {exc}") from None
        for key in ("id", "M", "N", "expected_s1"):
            if key not in e:
                raise ValueError(f"line {no}: missing field {key!r}")
        if e["id"] in seen:
            raise ValueError(f"line {no}: duplicate id {e['id']!r}")
        seen.add(e["id"])
        for key in ("M", "N", "expected_s1", "expected_I", "expected_R"):
            if e.get(key) is not None:
                try:
                    parse_expr(e[key])
                except ParseError as exc:
                    raise ValueError(f"line {no}: {key}: {exc}") from None
        entries.append(e)
    return entries


def run_entry(e, seed=0, digits=50):
    """Check one corpus entry; returns a result dict with a 'passed' flag."""
    started = time.perf_counter()
    ode = Ode2(e["M"], e["N"])
    o = e.get("options") or {}
    opts = SearchOptions(deg=o.get("deg"), den=as_poly(o["den"]) if o.get("den") else None)
    checks = {}
    trace = SearchTrace()
    expected = to_ratfunc(parse_expr(e["expected_s1"]))
    found = [s for k, s in sfunction_search(ode, opts, trace) if k == 1]
    match = any((s - expected).is_zero() for s in found)
    degree = max((a["degree"] for a in trace.attempts if a["accepted"]), default=None)
    if e.get("expected_deg") is not None:
        match = match and degree == e["expected_deg"]
    checks["s_function"] = {"passed": match, "degree": degree}
    if e.get("expected_I"):
        i_paper = parse_expr(e["expected_I"])
        ver = verify_first_integral(ode, i_paper, seed=seed, digits=digits)
        rep = invade(ode, opts, seed=seed)
        dep = False
        if rep.first_integral is not None:
            dep = functionally_dependent(parse_expr(rep.first_integral), i_paper, seed=seed)[0]
        checks["first_integral"] = {"passed": ver.passed and dep, "verified": ver.passed,
                                    "found": rep.first_integral, "dependent": dep}
    if e.get("expected_R"):
        r = parse_expr(e["expected_R"])
        if e.get("r_scaled_by_N"):
            r = normalize(Mul((r, from_ratfunc(RatFunc(ode.n)))))
        res = verify_compatibility(ode, r, expected, seed=seed, digits=digits)
        checks["compatibility"] = {"passed": all(ok for ok, _, _ in res),
                                   "max_abs_residuals": [w for _, w, _ in res]}
    return {"id": e["id"], "passed": all(c["passed"] for c in checks.values()), "checks": checks,
            "millis": int((time.perf_counter() - started) * 1000)}


def corpus_run(path=None, seed=0, digits=50):
    """(exit code, summary) for a corpus file; exit 1 if any entry fails."""
    entries = load_corpus(path or default_corpus())
    results = []
    for e in entries:
        try:
            results.append(run_entry(e, seed, digits))
        except (ValueError, ArithmeticError, AllPointsDegenerate) as exc:
            results.append({"id": e["id"], "passed": False, "checks": {}, "error": str(exc),
                            "millis": 0})
    passed = sum(r["passed"] for r in results)
    summary = {"entries": results, "passed": passed, "total": len(results)}
    return (OK if passed == len(results) else FAILED), summary


def cmd_corpus(args):
    try:
        return corpus_run(args.path, args.seed, args.precision)
    except (OSError, ValueError) as exc:
        raise UsageError(f"corpus: {exc}") from None


HANDLERS = {"dx": cmd_dx, "sfunction": cmd_sfunction, "exodes": cmd_exodes,
            "hfunction": cmd_hfunction, "pdeassol": cmd_pdeassol, "invade": cmd_invade,
            "gensol": cmd_gensol, "verify": cmd_verify}


# ---------------------------------------------------------------- output


def render_text(command, doc):
    if command == "corpus":
        lines = [f"{r['id']}: {'pass' if r['passed'] else 'FAIL'} ({r['millis']} ms)"
                 for r in doc["entries"]]
        lines.append(f"{doc['passed']}/{doc['total']} pass")
        return "\n".join(lines)
    if command == "invade":
        lines = [f"{s['name']}: {s['status']}" for s in doc["stages"]]
        lines.append(f"I = {doc['first_integral']}")
        return "\n".join(lines)
    lines = []
    for key, value in doc.items():
        if key == "attempts":
            continue
        if isinstance(value, list):
            lines.extend(f"{key}: {json.dumps(v, sort_keys=True) if isinstance(v, dict) else v}"
                         for v in value)
        elif isinstance(value, dict):
            lines.extend(f"{k}: {v}" for k, v in value.items())
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        if args.command == "corpus":
            code, doc = cmd_corpus(args)
        else:
            ode = ode_from_args(args)
            code, doc = HANDLERS[args.command](args, ode)
    except (UsageError, ParseError, ValueError, ZeroDivisionError) as exc:
        print(f"sfint {args.command}: {exc}", file=err)
        return USAGE
    if args.json:
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        print(render_text(args.command, doc), file=out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
