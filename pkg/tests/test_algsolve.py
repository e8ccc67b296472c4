import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from odes import worked
from planted import planted_system, recovers
import sfint.algsolve as algsolve
from sfint.algsolve import (
    BudgetExceeded, CoeffSystem, Inconsistent, check_branch, groebner_lex, linear_reduce,
    rational_roots, solve_rational, specializations, triangularize,
)
from sfint.detsys import extract_system, make_ansatz, residual_s1
from sfint.symcore import Poly, normalize_ratfunc, parse_expr
from sfint.symcore.rat import rat


def _poly(text):
    return normalize_ratfunc(parse_expr(text)).num


def system(*texts, unknowns=None):
    return CoeffSystem.make([_poly(t) for t in texts], unknowns)


def values(branch):
    return {u: str(r) for u, r in branch.assignments}


# ---------------------------------------------------------------- CoeffSystem


def test_system_is_deduplicated_and_primitive():
    s = system("2*a + 4*b", "a + 2*b", "-a - 2*b", "0")
    assert s.equations == (_poly("a + 2*b"),)
    assert s.unknowns == ("a", "b")


def test_system_rejects_foreign_variables():
    with pytest.raises(ValueError):
        system("a + x", unknowns=["a"])


# ---------------------------------------------------------------- linear_reduce


def test_linear_reduce_worked_coefficients():
    assign, rest = linear_reduce(system("a1 + 1", "a2", "a0^2 + a3", unknowns=["a0", "a1", "a2", "a3"]))
    assert str(assign["a1"]) == "-1"
    assert str(assign["a2"]) == "0"
    assert "a1" not in {v for e in rest.equations for v in e.variables()}


def test_linear_reduce_empty_system():
    assign, rest = linear_reduce(CoeffSystem.make([]))
    assert assign == {} and rest.equations == ()


def test_linear_reduce_linear_pair():
    assign, rest = linear_reduce(system("a + b", "a - b"))
    assert str(assign["a"]) == "0" and str(assign["b"]) == "0"
    assert rest.equations == ()


def test_linear_reduce_inconsistent():
    with pytest.raises(Inconsistent):
        linear_reduce(system("a - 1", "a - 2"))


# ---------------------------------------------------------------- Groebner bases


def test_triangularize_examples():
    assert triangularize(system("a^2 - 1", "a + b")) == [_poly("b^2 - 1"), _poly("a + b")]
    assert triangularize(system("a - 1")) == [_poly("a - 1")]
    assert triangularize(system("a^2", "a - 1")) == [Poly.const(1)]


def _sympy_basis(polys, gens):
    syms = sympy.symbols(gens)
    exprs = [sympy.sympify(str(p).replace("^", "**")) for p in polys]
    gb = sympy.groebner(exprs, *syms, order="lex")
    out = set()
    for g in gb.exprs:
        q = sympy.Poly(g, *syms)
        q = q.primitive()[1]
        if q.LC() < 0:
            q = -q
        out.add(sympy.expand(q.as_expr()))
    return out


def _mine(polys, gens):
    out = set()
    for p in groebner_lex(polys, gens):
        q = sympy.Poly(sympy.sympify(str(p).replace("^", "**")), *sympy.symbols(gens))
        if q.LC() < 0:
            q = -q
        out.add(sympy.expand(q.as_expr()))
    return out


@pytest.mark.parametrize("seed", range(40))
def test_groebner_matches_sympy(seed):
    s, _ = planted_system(seed)
    gens = s.unknowns
    assert _mine(list(s.equations), gens) == _sympy_basis(list(s.equations), gens)


def test_groebner_keeps_generators_with_divisible_leads():
    # regression: a generator whose lead term is divisible by another's must still
    # take part in the basis computation
    polys = [_poly("c^2 - e"), _poly("c*e - 1"), _poly("e^2 - c")]
    assert _mine(polys, ("c", "e")) == _sympy_basis(polys, ("c", "e"))


def test_groebner_budget(monkeypatch):
    monkeypatch.setattr(algsolve, "MAX_REDUCTIONS", 0)
    with pytest.raises(BudgetExceeded):
        groebner_lex([_poly("a^2 + b^2 - 5"), _poly("a*b - 2")], ("a", "b"))


# ---------------------------------------------------------------- rational roots and branches


def test_rational_roots():
    assert rational_roots(_poly("6*a^3 - 5*a^2 - 2*a + 1")) == [rat(-1, 2), rat(1, 3), rat(1)]
    assert rational_roots(_poly("a^2 - 2")) == []


def test_solve_worked_system():
    ans = make_ansatz(1)
    s = CoeffSystem.make(extract_system(residual_s1(worked(), ans)), ans.unknowns)
    branches = solve_rational(s)
    assert len(branches) == 1
    assert values(branches[0]) == {"a0": "0", "a1": "-1", "a2": "0", "a3": "1"}


def test_solve_double_root():
    (b,) = solve_rational(system("a0^2"))
    assert values(b) == {"a0": "0"}


def test_solve_two_branches_in_tie_break_order():
    branches = solve_rational(system("a^2 - 1", "a + b"))
    assert [values(b) for b in branches] == [{"a": "-1", "b": "1"}, {"a": "1", "b": "-1"}]


def test_solve_irrational_only():
    assert solve_rational(system("a^2 - 2")) == []


def test_free_unknowns_and_specializations():
    (b,) = solve_rational(system("a - 2*b", unknowns=["a", "b"]))
    assert b.free == ("b",)
    specs = specializations(b)
    assert specs[0] == {"a": 0, "b": 0}
    assert specs[1] == {"a": 2, "b": 1}


# ---------------------------------------------------------------- properties


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_planted_dense_systems_are_recovered(seed):
    s, plant = planted_system(seed, dense=True)
    branches = solve_rational(s)
    assert recovers(branches, plant)
    assert all(check_branch(s, b) for b in branches)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_branches_are_sound_on_sparse_systems(seed):
    s, _ = planted_system(seed)
    assert all(check_branch(s, b) for b in solve_rational(s))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_solver_is_deterministic(seed):
    s, _ = planted_system(seed)
    first = [str(b) for b in solve_rational(s)]
    again = [str(b) for b in solve_rational(CoeffSystem.make(list(s.equations), s.unknowns))]
    assert first == again
