"""Acceptance criteria, one test each, at the stated tolerances and time limits.

Every test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""

import random
import time
import tracemalloc

import mpmath

from odes import (
    EXP2_H1, EXP2_H2, EXP2_H3, EXP2_S2, WORKED_I, WORKED_S1, corpus_entries, corpus_ode, exp2,
    perf, worked,
)
from planted import planted_system, recovers
from sfint.algsolve import CoeffSystem, check_branch, solve_rational
from sfint.detsys import RESIDUALS, build_dx, extract_system, make_ansatz, residual_s1
from sfint.pipeline import (
    SearchOptions, functionally_dependent, invade, reduce_characteristic, sfunction_search,
    verify_compatibility, verify_first_integral,
)
from sfint.pipeline.search import SearchTrace, as_poly
from sfint.pipeline.verify import numeric_zero, raw_dx
from sfint.symcore import Mul, Ode2, RatFunc, differentiate, eval_numeric, normalize_ratfunc, parse_expr
from sfint.symcore.expr import from_ratfunc, normalize
from sfint.symcore.rat import rat

TABLE1 = [e for e in corpus_entries() if e["id"].startswith("t1-")]
TABLE3 = [e for e in corpus_entries() if e["id"].startswith("t3-")]
TIGHT = mpmath.mpf("1e-30")
LOOSE = mpmath.mpf("1e-25")

_searches = {}


def rf(text):
    return normalize_ratfunc(parse_expr(text))


def search_s1(entry):
    """(found S1 list, accepted degree, seconds), cached across criteria."""
    if entry["id"] not in _searches:
        o = entry.get("options") or {}
        opts = SearchOptions(deg=o.get("deg"), den=as_poly(o["den"]) if o.get("den") else None)
        trace = SearchTrace()
        started = time.perf_counter()
        found = [s for k, s in sfunction_search(corpus_ode(entry), opts, trace) if k == 1]
        took = time.perf_counter() - started
        degree = max((a["degree"] for a in trace.attempts if a["accepted"]), default=None)
        _searches[entry["id"]] = (found, degree, took)
    return _searches[entry["id"]]


def test_criterion_1_worked_example(criterion):
    def check():
        started = time.perf_counter()
        ode = worked()
        ans = make_ansatz(1)
        system = CoeffSystem.make(extract_system(residual_s1(ode, ans)), ans.unknowns)
        branches = solve_rational(system)
        values = [{u: str(r) for u, r in b.assignments} for b in branches]
        branch_ok = values == [{"a0": "0", "a1": "-1", "a2": "0", "a3": "1"}]
        s_ok = sfunction_search(ode) == [(1, rf(WORKED_S1))]
        red = reduce_characteristic(ode, parse_expr(WORKED_S1), 1)
        red_ok = red.ode.rhs == rf("-h*(h*x^4 - 4*h*x^3 + 1)")
        rep = invade(ode)
        dep, worst = False, "none"
        if rep.first_integral is not None:
            dep, worst = functionally_dependent(parse_expr(rep.first_integral), parse_expr(WORKED_I),
                                                points=20, digits=50, tol=LOOSE)
        took = time.perf_counter() - started
        ok = branch_ok and s_ok and red_ok and dep and took < 5
        return ok, (f"branch={branch_ok} S1={s_ok} reduced={red_ok} dependent={dep} "
                    f"jacobian={worst} time={took:.2f}s")
    criterion("criterion 1: worked example end to end", check)


def test_criterion_2_table1_verification(criterion):
    def check():
        started = time.perf_counter()
        rows = []
        for e in TABLE1:
            t0 = time.perf_counter()
            tracemalloc.start()
            v = verify_first_integral(corpus_ode(e), parse_expr(e["expected_I"]), points=100,
                                      digits=50, tol=TIGHT)
            peak = tracemalloc.get_traced_memory()[1]
            tracemalloc.stop()
            dt = time.perf_counter() - t0
            rows.append((e["id"], v.passed and v.points >= 100 and dt < 5 and peak < 200 * 2 ** 20,
                         v.max_abs_residual))
        took = time.perf_counter() - started
        ok = len(rows) == 10 and all(r[1] for r in rows) and took < 30
        worst = max(float(r[2]) for r in rows)
        return ok, f"{sum(r[1] for r in rows)}/10 rows, worst residual {worst:.3g}, time={took:.1f}s"
    criterion("criterion 2: table 1 first integrals verify", check)


def test_criterion_3_table2_sfunctions(criterion):
    def check():
        good = []
        for e in TABLE1:
            found, _, took = search_s1(e)
            expected = rf(e["expected_s1"])
            match = any((s.num * expected.den - expected.num * s.den).is_zero() for s in found)
            good.append(match and took < 10)
        slowest = max(search_s1(e)[2] for e in TABLE1)
        return len(good) == 10 and all(good), f"{sum(good)}/10 rows, slowest {slowest:.2f}s"
    criterion("criterion 3: table 2 S-functions reproduced", check)


def test_criterion_4_table2_compatibility(criterion):
    def check():
        good = []
        worst = 0.0
        for e in TABLE1:
            ode = corpus_ode(e)
            r = parse_expr(e["expected_R"])
            if e.get("r_scaled_by_N"):
                r = normalize(Mul((r, from_ratfunc(RatFunc(ode.n)))))
            res = verify_compatibility(ode, r, rf(e["expected_s1"]), points=50, digits=50, tol=TIGHT)
            good.append(all(ok for ok, _, _ in res))
            worst = max([worst] + [float(w) for _, w, _ in res])
        return len(good) == 10 and all(good), f"{sum(good)}/10 rows, worst residual {worst:.3g}"
    criterion("criterion 4: table 2 compatibility residuals", check)


def test_criterion_5_table3_sfunctions(criterion):
    want = {"t3-11": 1, "t3-12": 4, "t3-13": 4, "t3-14": 1, "t3-15": 6}

    def check():
        out = []
        for e in TABLE3:
            found, degree, took = search_s1(e)
            expected = rf(e["expected_s1"])
            match = any((s - expected).is_zero() for s in found)
            out.append((e["id"], match and degree == want[e["id"]] and took < 60, degree, took))
        ok = len(out) == 5 and all(r[1] for r in out)
        detail = ", ".join(f"{i}: deg {d} {t:.1f}s" for i, _, d, t in out)
        return ok, detail
    criterion("criterion 5: table 3 S-functions and degrees", check)


def test_criterion_6_second_example(criterion):
    def check():
        ode = exp2()
        found = sfunction_search(ode, SearchOptions(sn=2))
        s_ok = (2, rf(EXP2_S2)) in found
        dx = build_dx(ode)
        h2_ok = numeric_zero(raw_dx(ode, parse_expr(EXP2_H2)), ("x", "y", "z"), tol=TIGHT)[0]
        h3_ok = numeric_zero(raw_dx(ode, parse_expr(EXP2_H3)), ("x", "y", "z"), tol=TIGHT)[0]
        h1 = dx(parse_expr(EXP2_H1))
        h1_ok = numeric_zero(h1 + parse_expr("1/x"), ("x", "y", "z"), tol=TIGHT)[0]
        ok = s_ok and h2_ok and h3_ok and h1_ok
        return ok, f"S2={s_ok} DxH2=0:{h2_ok} DxH3=0:{h3_ok} DxH1=-1/x:{h1_ok} ({h1})"
    criterion("criterion 6: second example S2 and H checks", check)


def test_criterion_7_exponential_integral_example(criterion):
    def check():
        ode = perf()
        started = time.perf_counter()
        found = sfunction_search(ode, SearchOptions(sn=3, den=as_poly("x")))
        took = time.perf_counter() - started
        s_ok = (3, rf("4*y/x")) in found and took < 1
        rep = invade(ode, SearchOptions(sn=3, den=as_poly("x"), en=3))
        i = rep.first_integral
        inert = i is not None and "int(" in i
        ver = verify_first_integral(ode, parse_expr(i), tol=LOOSE) if i else None
        v_ok = ver is not None and ver.passed
        ok = s_ok and rep.exit == 0 and inert and v_ok
        res = ver.max_abs_residual if ver else "none"
        return ok, f"S3 in {took:.3f}s={s_ok} inert integral={inert} residual={res}"
    criterion("criterion 7: S3 = 4y/x and an integral with an inert node", check)


def _planted_sweep():
    bad = []
    for seed in range(500):
        system, plant = planted_system(seed, dense=True)
        branches = solve_rational(system)
        if not recovers(branches, plant) or not all(check_branch(system, b) for b in branches):
            bad.append(seed)
    return bad


def _round_trip():
    bad = []
    for e in TABLE1 + TABLE3:
        found, _, _ = search_s1(e)
        ode = corpus_ode(e)
        for s in found:
            if not RESIDUALS[1](ode, s.num, s.den).residual.is_zero():
                bad.append(e["id"])
    for ode, k, s in ((exp2(), 2, rf(EXP2_S2)), (perf(), 3, rf("4*y/x"))):
        if not RESIDUALS[k](ode, s.num, s.den).residual.is_zero():
            bad.append(f"S{k}")
    return bad


def _finite_differences():
    exprs = ["exp(-x)*(z*x^4 - y)/(z - x)", "z^3*y - ln(z^4*x + y)", "ln(x^2 + y^2 + 1)*exp(z)",
             "(x*z + y)^(1/2)", "x^(-3)*exp(y*z)"]
    rng = random.Random(8)
    h = rat(1, 10 ** 20)
    worst = mpmath.mpf(0)
    for text in exprs:
        e = parse_expr(text)
        pt = {v: rat(rng.randint(5, 40), rng.randint(7, 20)) for v in "xyz"}
        for var in "xyz":
            up, dn = dict(pt), dict(pt)
            up[var] += h
            dn[var] -= h
            with mpmath.workdps(60):
                approx = (eval_numeric(e, up, 60) - eval_numeric(e, dn, 60)) / (2 * mpmath.mpf(h.numerator) / h.denominator)
                exact = eval_numeric(differentiate(e, var), pt, 60)
                worst = max(worst, abs(exact - approx) / max(1, abs(exact)))
    return worst


def test_criterion_8_property_suites(criterion):
    def check():
        bad_plants = _planted_sweep()
        bad_round = _round_trip()
        fd = _finite_differences()
        rep = invade(Ode2("x"))
        dep = rep.first_integral is not None and rep.verification is not None and \
            functionally_dependent(parse_expr(rep.first_integral), parse_expr("z - x^2/2"))[0]
        ok = not bad_plants and not bad_round and fd < TIGHT and dep
        return ok, (f"(a) {500 - len(bad_plants)}/500 plants recovered; "
                    f"(b) round-trip failures {bad_round or 'none'}; "
                    f"(c) max finite-difference gap {mpmath.nstr(fd, 3)}; "
                    f"(d) z'=x gives I={rep.first_integral} dependent={dep}")
    criterion("criterion 8: property suites", check)
