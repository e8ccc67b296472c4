import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from odes import (
    EXP2_H1, EXP2_H2, EXP2_H3, EXP2_S2, WORKED_S1, corpus_entries, corpus_ode, exp2, perf, worked,
)
from sfint.detsys import (
    build_dx, degree_bound, extract_system, make_ansatz, residual_s1, residual_s2, residual_s3,
    substitute_solution,
)
from sfint.pipeline.verify import numeric_zero
from sfint.symcore import Ode2, Poly, RatFunc, normalize, normalize_ratfunc, parse_expr
from sfint.symcore.expr import is_zero

X, Y, Z = Poly.var("x"), Poly.var("y"), Poly.var("z")


def ratfunc(text):
    return normalize_ratfunc(parse_expr(text))


# ---------------------------------------------------------------- D_x


def test_dx_of_z_is_phi():
    ode = worked()
    assert normalize_ratfunc(build_dx(ode)(parse_expr("z"))) == ode.phi


@pytest.mark.parametrize("h", [EXP2_H2, EXP2_H3])
def test_dx_annihilates_h2_and_h3(h):
    e = build_dx(exp2())(parse_expr(h))
    assert is_zero(e) or numeric_zero(e, ("x", "y", "z"), points=30)[0]


def test_dx_of_h1_is_minus_one_over_x():
    e = build_dx(exp2())(parse_expr(EXP2_H1))
    assert e == parse_expr("-1/x")


def test_cleared_operator_relation():
    ode = worked()
    dx = build_dx(ode)
    p = X ** 2 * Y - Z ** 3 + 4
    lhs = RatFunc(ode.n * ode.n) * dx.on_ratfunc(RatFunc(p))
    assert lhs == RatFunc(ode.n * dx.cleared(p))


# ---------------------------------------------------------------- ansatz and bound


def test_ansatz_degree_zero():
    a = make_ansatz(0)
    assert a.unknowns == ("a0",)
    assert a.poly == Poly.var("a0")


def test_ansatz_degree_one():
    a = make_ansatz(1)
    a0, a1, a2, a3 = (Poly.var(u) for u in a.unknowns)
    assert a.poly == a0 + a1 * X + a2 * Y + a3 * Z


def test_ansatz_degree_two_and_bad_degree():
    assert len(make_ansatz(2).unknowns) == 10
    with pytest.raises(ValueError):
        make_ansatz(-1)


def test_degree_bound_examples():
    assert degree_bound(worked()) == 5
    assert degree_bound(Ode2("z")) == 0
    assert degree_bound(Ode2("-(x^2*z^8 + y*z^4*x - z*x + y)",
                             "x*z^2*(3*y*z^4*x - 4*z*x + 3*y^2)")) == 9


# ---------------------------------------------------------------- residuals


def test_s1_residual_of_worked_example():
    r = ratfunc(WORKED_S1)
    assert residual_s1(worked(), r.num, r.den).residual.is_zero()


def test_s1_residual_trivial_cases():
    assert residual_s1(Ode2("0"), Poly.const(0), Poly.const(1)).residual.is_zero()
    assert residual_s1(Ode2("z"), Poly.const(-1), Poly.const(1)).residual.is_zero()


def test_s2_residual_examples():
    r = ratfunc(EXP2_S2)
    assert residual_s2(exp2(), r.num, r.den).residual.is_zero()
    assert residual_s2(Ode2("0"), Poly.const(0)).residual.is_zero()
    assert residual_s2(Ode2("z"), Poly.const(0)).residual.is_zero()


def test_s3_residual_examples():
    assert residual_s3(perf(), 4 * Y, X).residual.is_zero()
    assert residual_s3(Ode2("z"), Poly.const(0), Poly.const(1)).residual.is_zero()
    ode = worked()
    s1 = ratfunc(WORKED_S1)
    s2 = -ode.phi - RatFunc(Z) * s1
    s3 = s2 / s1
    assert residual_s3(ode, s3.num, s3.den).residual.is_zero()


def test_wrong_candidate_leaves_residual():
    assert not residual_s1(worked(), Z, X).residual.is_zero()


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        residual_s1(worked(), X, Poly.const(0))


@pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e["id"])
def test_corpus_s1_residuals_vanish(entry):
    s = ratfunc(entry["expected_s1"])
    assert residual_s1(corpus_ode(entry), s.num, s.den).residual.is_zero()


# ---------------------------------------------------------------- determining systems


def _up_to_sign(eqs):
    out = set()
    for e in eqs:
        out.add(str(e))
        out.add(str(-e))
    return out


def test_worked_system_contains_printed_equations():
    eqs = extract_system(residual_s1(worked(), make_ansatz(1)))
    have = _up_to_sign(eqs)
    for want in ("a1 + 1", "a2", "a0^2", "a3^2 - 2*a3 + 1"):
        assert str(normalize_ratfunc(parse_expr(want)).num) in have


def test_vanishing_residual_gives_empty_system():
    r = ratfunc(WORKED_S1)
    assert extract_system(residual_s1(worked(), r.num, r.den)) == []


def _sympy_residual_s1(ode, p_text):
    """Residual of the S1 determining equation with denominator N, built in sympy."""
    x, y, z = sympy.symbols("x y z")
    m = sympy.sympify(str(ode.m).replace("^", "**"))
    n = sympy.sympify(str(ode.n).replace("^", "**"))
    p = sympy.sympify(p_text.replace("^", "**"))

    def d(f):
        return n * f.diff(x) + z * n * f.diff(y) + m * f.diff(z)

    res = (-p ** 2 - (n.diff(x) + z * n.diff(y) + m.diff(z)) * p + d(p)
           - m * n.diff(y) + m.diff(y) * n)
    return sympy.Poly(sympy.expand(res), x, y, z)


def test_s1_system_matches_independent_expansion():
    ode = Ode2("z^2 + x*y", "x + y^2")
    mine = extract_system(residual_s1(ode, make_ansatz(1)))
    oracle = _sympy_residual_s1(ode, "a0 + a1*x + a2*y + a3*z")
    mine_s = sorted(str(sympy.expand(sympy.sympify(str(e).replace("^", "**")))) for e in mine)
    assert mine_s == sorted(str(sympy.expand(c)) for c in oracle.coeffs())


@pytest.mark.parametrize("entry", corpus_entries()[:5], ids=lambda e: e["id"])
def test_s1_residual_two_routes(entry):
    """Literal polynomial form versus D_x applied to S and cleared by N^2 E^2."""
    ode = corpus_ode(entry)
    p = X * Z - Y + 3
    lit = residual_s1(ode, p).residual
    oracle = _sympy_residual_s1(ode, str(p))
    assert sympy.expand(sympy.sympify(str(lit).replace("^", "**")) - oracle.as_expr()) == 0
    s = RatFunc.make(p, ode.n)
    phi = ode.phi
    pde = build_dx(ode).on_ratfunc(s) - s * s - phi.diff("z") * s + phi.diff("y")
    assert pde * RatFunc(ode.n * ode.n) == RatFunc(lit)
    # general denominator branch
    e = X + 2 * Y + 1
    s = RatFunc.make(p, e)
    pde = build_dx(ode).on_ratfunc(s) - s * s - phi.diff("z") * s + phi.diff("y")
    general = residual_s1(ode, p, e).residual
    assert pde * RatFunc(ode.n * ode.n * e * e) == RatFunc(general)


def test_ansatz_solution_round_trip():
    from sfint.algsolve import CoeffSystem, solve_rational, specializations
    ode = worked()
    ans = make_ansatz(1)
    res = residual_s1(ode, ans)
    sys = CoeffSystem.make(extract_system(res), ans.unknowns)
    for br in solve_rational(sys):
        for vals in specializations(br):
            p = substitute_solution(ans, vals)
            assert residual_s1(ode, p).residual.is_zero()


# ---------------------------------------------------------------- linearity of D_x

exprs = st.sampled_from(["x*z + y", "exp(x)*y", "ln(z^2 + 1) + x", "(y - z)/(x + 3)",
                         "z^3*y - ln(z^4*x + y)"])
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=9)


@settings(max_examples=25, deadline=None)
@given(exprs, exprs, rationals, rationals)
def test_dx_is_linear(e1, e2, a, b):
    dx = build_dx(worked())
    u, v = parse_expr(e1), parse_expr(e2)
    ca, cb = parse_expr(f"{a.numerator}/{a.denominator}"), parse_expr(f"{b.numerator}/{b.denominator}")
    lhs = dx(ca * u + cb * v)
    rhs = ca * dx(u) + cb * dx(v)
    diff = normalize(lhs - rhs)
    assert is_zero(diff) or numeric_zero(diff, ("x", "y", "z"), points=10,
                                         seed=random.Random(e1 + e2).randint(0, 99))[0]
