"""Strategy chain for first-order ODEs d(dep)/d(indep) = f.

Each strategy returns a candidate H with H_indep + f H_dep = 0; the chain
keeps the first candidate that passes numeric verification.
"""

from dataclasses import dataclass, field

from ..symcore.expr import (
    Const, Expr, Integral, Pow, Var, differentiate, free_vars, from_ratfunc, has_node, is_zero,
    normalize, subs, try_ratfunc,
)
from ..symcore.poly import poly_factor
from ..symcore.ratfunc import RatFunc
from .darboux import prelle_singer
from .integrate import choose_lower, integrate
from .sfunctions import Ode1
from .verify import verify_h_function

D_MAX = 3
STRATEGIES = ("linear", "separable", "bernoulli", "exact", "darboux")


@dataclass(frozen=True)
class HFunction:
    expr: Expr
    k: int = None
    strategy: str = ""

    def __str__(self):
        return str(self.expr)


@dataclass
class SolveTrace:
    attempts: list = field(default_factory=list)

    def add(self, name, status, detail=""):
        self.attempts.append({"strategy": name, "status": status, "detail": detail})


def count_integrals(e):
    return str(e).count("int(")


# ---------------------------------------------------------------- building blocks


def _swap(o):
    """The same ODE with dependent and independent variables exchanged."""
    f = o.rhs_expr
    if is_zero(f):
        return None
    inv = normalize(Const(1) / f)
    r = try_ratfunc(inv)
    return Ode1(r if r is not None else inv, o.indep, o.dep, o.param)


def _linear_parts(f, y):
    """(a, b) with f = a*y + b and a, b free of y, or None."""
    a = differentiate(f, y)
    if y in free_vars(a):
        return None
    b = normalize(f - a * Var(y))
    if y in free_vars(b):
        return None
    return a, b


def solve_linear_ode(a, b, y, t):
    """H for dy/dt = a*y + b."""
    w = integrate(a, t).exp(-1)
    g = integrate(normalize(b * w), t).to_expr()
    return normalize(Var(y) * w - g)


def potential(p, q, t, y):
    """H with H_t = p and H_y = q for a closed 1-form p dt + q dy."""
    best = None
    for first, second, a_var, b_var in ((p, q, t, y), (q, p, y, t)):
        cand = _potential_route(first, second, a_var, b_var)
        if cand is None:
            continue
        if best is None or count_integrals(cand) < count_integrals(best):
            best = cand
        if count_integrals(best) == 0:
            break
    return best


def _potential_route(p, q, t, y):
    part = integrate(p, t)
    elem = part.elementary()
    g_full = normalize(q - differentiate(elem, y))
    lower = None
    if not part.is_elementary:
        lower = choose_lower(normalize(part.remainder + g_full), t)
    else:
        lower = choose_lower(g_full, t)
    try:
        g = normalize(subs(g_full, {t: Const(lower)}))
    except ZeroDivisionError:
        return None
    if t in free_vars(g):
        return None
    f = part.to_expr(lower)
    return normalize(f + integrate(g, y).to_expr())


# ---------------------------------------------------------------- strategies


def strategy_linear(o):
    f = o.rhs_expr
    parts = _linear_parts(f, o.dep)
    if parts is None:
        return None
    return solve_linear_ode(parts[0], parts[1], o.dep, o.indep)


def strategy_separable(o):
    r = o.rhs_ratfunc
    if r is None:
        return None
    if r.is_zero():
        return from_ratfunc(RatFunc.var(o.dep))
    t, y = o.indep, o.dep
    g, k = RatFunc.const(1), RatFunc.const(1)
    for poly, sign in ((r.num, 1), (r.den, -1)):
        c, facs = poly_factor(poly)
        g = g * (RatFunc.const(c) if sign > 0 else RatFunc.const(1 / c))
        for p, m in facs:
            vs = set(p.variables())
            piece = RatFunc(p) ** (m * sign)
            if y in vs and t in vs:
                return None
            if y in vs:
                k = k * piece
            else:
                g = g * piece
    hy = integrate(from_ratfunc(k.inverse()), y).to_expr()
    ht = integrate(from_ratfunc(g), t).to_expr()
    return normalize(hy - ht)


def _power_terms(r, y):
    """{exponent: coefficient} with r = sum c_e * y^e and coefficients free of y, or None."""
    dmap = r.den.coeff_map((y,))
    if len(dmap) != 1:
        return None
    (kd,), dpoly = next(iter(dmap.items()))
    dr = RatFunc.make(dpoly)
    out = {}
    for (i,), c in r.num.coeff_map((y,)).items():
        out[i - kd] = RatFunc.make(c) / dr
    return out


def strategy_bernoulli(o):
    r = o.rhs_ratfunc
    if r is None:
        return None
    y, t = o.dep, o.indep
    terms = _power_terms(r, y)
    if terms is None or set(terms) - {1} == set() or 1 not in terms or len(terms) != 2:
        return None
    n = next(e for e in terms if e != 1)
    if n == 0:
        return None
    a, b = terms[1], terms[n]
    w = "w_"
    k = 1 - n
    hw = solve_linear_ode(from_ratfunc(a.scale(k)), from_ratfunc(b.scale(k)), w, t)
    return normalize(subs(hw, {w: Pow(Var(y), k)}))


def strategy_exact(o):
    r = o.rhs_ratfunc
    if r is None:
        return None
    t, y = o.indep, o.dep
    m, n = r.num, r.den
    if not (m.diff(y) + n.diff(t)).is_zero():
        return None
    return potential(from_ratfunc(RatFunc(m)), from_ratfunc(RatFunc(-n)), t, y)


def strategy_darboux(o, d_max=D_MAX):
    r = o.rhs_ratfunc
    if r is None:
        return None
    t, y = o.indep, o.dep
    found = prelle_singer(r.num, r.den, t, y, o.params(), d_max)
    if found is None:
        return None
    kind, expr = found
    if kind == "integral":
        return expr
    rm = normalize(expr * from_ratfunc(RatFunc(r.num)))
    rn = normalize(expr * from_ratfunc(RatFunc(-r.den)))
    return potential(rm, rn, t, y)


def _both_ways(strategy):
    def run(o):
        h = strategy(o)
        if h is not None:
            return h
        s = _swap(o)
        return strategy(s) if s is not None else None
    return run


_CHAIN = {
    "linear": _both_ways(strategy_linear),
    "separable": strategy_separable,
    "bernoulli": _both_ways(strategy_bernoulli),
    "exact": strategy_exact,
}


def solve_1ode(o, k=None, d_max=D_MAX, trace=None, seed=0, strategies=STRATEGIES, points=50):
    """First verified H from the strategy chain, or None.

    A verified H that still contains unevaluated integrals is kept only as a
    fallback while the remaining strategies are tried.
    """
    fallback = None
    for name in strategies:
        try:
            if name == "darboux":
                h = strategy_darboux(o, d_max)
            else:
                h = _CHAIN[name](o)
        except (ZeroDivisionError, ValueError, ArithmeticError) as exc:
            if trace is not None:
                trace.add(name, "error", str(exc))
            continue
        if h is None:
            if trace is not None:
                trace.add(name, "not applicable")
            continue
        if o.dep not in free_vars(h) and o.indep not in free_vars(h):
            if trace is not None:
                trace.add(name, "rejected", "constant candidate")
            continue
        ok, detail = verify_h_function(o, h, points=points, seed=seed)
        if trace is not None:
            trace.add(name, "verified" if ok else "rejected", detail)
        if not ok:
            continue
        if count_integrals(h) == 0:
            return HFunction(h, k, name)
        if fallback is None:
            fallback = HFunction(h, k, name)
    return fallback
