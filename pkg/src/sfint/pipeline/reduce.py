"""Characteristic reduction: from an H-function to a 1ODE in (t, h), and back."""

from dataclasses import dataclass

from ..detsys import build_dx
from ..symcore.expr import (
    Add, Const, Exp, Expr, Integral, Ln, Mul, Pow, Var, differentiate, free_vars, from_ratfunc,
    is_zero, normalize, subs, try_ratfunc,
)
from ..symcore.ratfunc import RatFunc
from .sfunctions import Ode1
from .verify import ConstantResult, is_nonconstant

H = "h"
W = "w_"
# surviving parameter of each associated 1ODE
PARAMETER = {1: "x", 2: "y", 3: "z"}
TARGETS = ("z", "y", "x")


class EliminationFailed(ValueError):
    pass


@dataclass(frozen=True)
class Reduction:
    ode: Ode1
    eliminated: str
    solved: Expr

    def to_json(self):
        return {"ode": str(self.ode), "eliminated": self.eliminated, "solved": str(self.solved)}


def weight(ode, t):
    """Coefficient of d/dt in D_x: 1 for x, z for y, phi for z."""
    if t == "x":
        return Const(1)
    if t == "y":
        return Var("z")
    return from_ratfunc(ode.phi)


def solve_for(e, v, name=H):
    """v in terms of ``name`` from name = e, when e is affine or Mobius in v.

    Transcendental subtrees free of v are frozen as symbols first.
    """
    frozen = {}
    for i, op in enumerate(op for op in operands(e) if v not in free_vars(op)):
        sym = f"{W}{i}"
        frozen[sym] = op
        e = replace(e, op, Var(sym))
    e = normalize(e)
    r = try_ratfunc(e)
    if r is not None:
        sol = _mobius_inverse(r, v, name)
    else:
        sol = _affine_inverse(e, v, name)
    if sol is None:
        return None
    return normalize(subs(sol, frozen)) if frozen else sol


def _mobius_inverse(r, v, name):
    dn, dd = r.num.degree(v), r.den.degree(v)
    if dn > 1 or dd > 1 or max(dn, dd) < 1:
        return None
    a, b = r.num.coeff_of(v, 1), r.num.coeff_of(v, 0)
    c, d = r.den.coeff_of(v, 1), r.den.coeff_of(v, 0)
    h = RatFunc.var(name)
    top = RatFunc(b) - h * RatFunc(d)
    bottom = h * RatFunc(c) - RatFunc(a)
    if bottom.is_zero():
        return None
    return from_ratfunc(top / bottom)


def _affine_inverse(e, v, name):
    a = differentiate(e, v)
    if is_zero(a) or v in free_vars(a):
        return None
    b = normalize(e - a * Var(v))
    if v in free_vars(b):
        return None
    return normalize((Var(name) - b) / a)


def operands(e):
    """Non-rational subtrees of e (exp, ln, fractional powers), outermost first."""
    out = []

    def walk(node):
        t = type(node)
        if t in (Exp, Ln, Integral) or (t is Pow and node.exp.denominator != 1):
            if node not in out:
                out.append(node)
            return
        if t in (Add, Mul):
            for a in node.args:
                walk(a)
        elif t is Pow:
            walk(node.base)

    walk(e)
    return out


def replace(e, target, new):
    """Structural replacement of a subtree."""
    if e == target:
        return new
    t = type(e)
    if t is Add:
        return Add(tuple(replace(a, target, new) for a in e.args))
    if t is Mul:
        return Mul(tuple(replace(a, target, new) for a in e.args))
    if t is Pow:
        return Pow(replace(e.base, target, new), e.exp)
    if t is Exp:
        return Exp(replace(e.arg, target, new))
    if t is Ln:
        return Ln(replace(e.arg, target, new))
    return e


def _try_target(rhs_full, h_expr, v):
    sol = solve_for(h_expr, v)
    if sol is None:
        return None
    try:
        out = normalize(subs(rhs_full, {v: sol}))
    except ZeroDivisionError:
        return None
    return out, sol


def reduce_characteristic(ode, h_expr, k):
    """(Reduction, d/dt of h) for an H-function of the k-th associated 1ODE.

    The reduced ODE is dh/dt = D_x[H]/weight expressed in t and h alone.
    """
    t = PARAMETER[k]
    h_expr = normalize(h_expr)
    dxh = build_dx(ode)(h_expr)
    if is_zero(dxh):
        return Reduction(Ode1(RatFunc.const(0), H, t), "", Const(0))
    rhs_full = normalize(dxh / weight(ode, t))
    allowed = {t, H}
    for v in TARGETS:
        if v == t or v not in free_vars(h_expr):
            continue
        got = _try_target(rhs_full, h_expr, v)
        if got is not None and free_vars(got[0]) <= allowed:
            return Reduction(_ode1(got[0], t), v, got[1])
    for op in operands(h_expr):
        hw = normalize(replace(h_expr, op, Var(W)))
        rw = normalize(replace(rhs_full, op, Var(W)))
        got = _try_target(rw, hw, W)
        if got is not None and free_vars(got[0]) <= allowed:
            return Reduction(_ode1(got[0], t), str(op), got[1])
    raise EliminationFailed("no variable or operand of H could be eliminated")


def _ode1(rhs, t):
    r = try_ratfunc(rhs)
    return Ode1(r if r is not None else rhs, H, t)


def compose_first_integral(f, h_expr, seed=0):
    """I = F(t, H): substitute the H-function for h."""
    i = normalize(subs(f, {H: h_expr}))
    if not free_vars(i) & {"x", "y", "z"} or not is_nonconstant(i, seed):
        raise ConstantResult("composed first integral is constant")
    return i
