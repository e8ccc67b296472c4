"""Symbolic integration with respect to one variable.

Rational functions are integrated by Hermite reduction followed by a
logarithmic part over the irreducible factors of the squarefree
denominator.  Terms carrying an exponential or algebraic kernel w (with
w'/w rational) go through a bounded Risch-equation ansatz.  Whatever cannot
be integrated in closed form is kept as an inert remainder, which callers
turn into an ``Integral`` node.
"""

from dataclasses import dataclass, field

from ..symcore.expr import (
    Const, Exp, Expr, Integral, Ln, Mul, Pow, Var, ZERO_E, canonical_terms, differentiate,
    free_vars, from_canonical_terms, from_ratfunc, is_rational_expr, is_zero, normalize, subs,
    to_ratfunc, try_ratfunc, DivisionByZero,
)
from ..symcore.poly import Poly, poly_factor
from ..symcore.rat import rat as _rat
from ..symcore.ratfunc import RatFunc
from .upoly import UPoly, solve_bezout, solve_linear, ugcd, ugcdex

_ZERO = RatFunc.const(0)


@dataclass
class Antiderivative:
    """rational + sum(c*ln(p)) + other + Integral(remainder)."""

    var: str
    rational: RatFunc = _ZERO
    logs: list = field(default_factory=list)
    other: Expr = ZERO_E
    remainder: Expr = ZERO_E

    @property
    def is_elementary(self):
        return is_zero(self.remainder)

    def elementary(self):
        parts = [from_ratfunc(self.rational), self.other]
        for c, p in self.logs:
            parts.append(Mul((from_ratfunc(c), Ln(from_ratfunc(RatFunc(p))))))
        return normalize(sum_exprs(parts))

    def to_expr(self, lower=None):
        e = self.elementary()
        if self.is_elementary:
            return e
        return normalize(e + inert_integral(self.remainder, self.var, lower))

    def exp(self, sign=1):
        """exp(sign * antiderivative), with c*ln(p) turned into p^c for constant c."""
        parts = []
        arg = [from_ratfunc(self.rational.scale(sign)), Mul((Const(sign), self.other))]
        for c, p in self.logs:
            c = c.scale(sign)
            base = from_ratfunc(RatFunc(p))
            if c.is_const():
                parts.append(Pow(base, c.const_value()))
            else:
                arg.append(Mul((from_ratfunc(c), Ln(base))))
        if not self.is_elementary:
            arg.append(Mul((Const(sign), inert_integral(self.remainder, self.var))))
        parts.append(Exp(sum_exprs(arg)))
        return normalize(Mul(tuple(parts)))


def sum_exprs(parts):
    parts = [p for p in parts if not (isinstance(p, Const) and p.value == 0)]
    if not parts:
        return ZERO_E
    from ..symcore.expr import Add
    return parts[0] if len(parts) == 1 else Add(tuple(parts))


# ---------------------------------------------------------------- inert integrals


LOWER_CANDIDATES = (0, 1, -1, 2, -2, 3)


def choose_lower(integrand, var):
    """First small integer where the integrand is defined (symbolically)."""
    for a in LOWER_CANDIDATES:
        try:
            normalize(subs(integrand, {var: Const(a)}))
            return a
        except (DivisionByZero, ZeroDivisionError):
            continue
    return LOWER_CANDIDATES[-1] + 1


def inert_integral(integrand, var, lower=None):
    integrand = normalize(integrand)
    if lower is None:
        lower = choose_lower(integrand, var)
    return Integral(integrand, var, lower, Var(var))


# ---------------------------------------------------------------- rational part


def _upair(r, t):
    return UPoly.from_poly(r.num, t), UPoly.from_poly(r.den, t)


def _integrate_poly(q, t):
    tv = RatFunc.var(t)
    out = _ZERO
    for i, c in enumerate(q.c):
        if not c.is_zero():
            out = out + c.scale(_rat(1, i + 1)) * tv ** (i + 1)
    return out


def hermite_reduce(a, d):
    """(g, h, ds): a/d = g' + h/ds with ds squarefree and deg h < deg ds."""
    t = d.var
    g = _ZERO
    dm = ugcd(d, d.diff())
    ds = d.exquo(dm)
    while dm.degree() > 0:
        dm2 = ugcd(dm, dm.diff())
        dms = dm.exquo(dm2)
        b, c = solve_bezout(-(ds * dm.diff()).exquo(dm), dms, a)
        a = c - b.diff() * ds.exquo(dms)
        g = g + b.to_ratfunc() / dm.to_ratfunc()
        dm = dm2
    return g, a, ds


def ratint(r, t):
    """(rational part, [(c, p)], remainder RatFunc) with d/dt(rational + sum c ln p) + remainder = r."""
    r = RatFunc.coerce(r)
    if r.is_zero():
        return _ZERO, [], _ZERO
    if not r.depends_on(t):
        return r * RatFunc.var(t), [], _ZERO
    num, den = _upair(r, t)
    q, a = num.divmod(den)
    rational = _integrate_poly(q, t)
    if a.is_zero():
        return rational, [], _ZERO
    inv = den.lc().inverse()
    a, den = a.scale(inv), den.monic()
    g, h, ds = hermite_reduce(a, den)
    rational = rational + g
    logs = []
    remainder = _ZERO
    if h.is_zero():
        return rational, logs, remainder
    _, facs = poly_factor(ds.to_poly())
    for p, _ in facs:
        if p.degree(t) <= 0:
            continue
        pu = UPoly.from_poly(p, t).monic()
        co = ds.exquo(pu)
        s, _, _ = ugcdex(co, pu)
        aj = (h * s) % pu
        if aj.is_zero():
            continue
        cq, rem = aj.divmod(pu.diff())
        if rem.is_zero() and cq.degree() <= 0:
            logs.append((cq.c[0], p))
        else:
            remainder = remainder + aj.to_ratfunc() / pu.to_ratfunc()
    return rational, logs, remainder


# ---------------------------------------------------------------- Risch equation


def _multiplicity(p, q):
    from ..symcore.poly import poly_exquo
    k = 0
    while True:
        try:
            q = poly_exquo(q, p)
        except ValueError:
            return k
        k += 1


def _deg(r, t):
    return r.num.degree(t) - r.den.degree(t)


def risch_de(f, g, t, allow_remainder=True):
    """Rational y (and remainder c/T) with y' + g*y + c/T = f, or None."""
    f, g = RatFunc.coerce(f), RatFunc.coerce(g)
    _, ffacs = poly_factor(f.den)
    e = Poly.const(1)
    sqf = Poly.const(1)
    for p, mf in ffacs:
        if p.degree(t) <= 0:
            continue
        sqf = sqf * p
        k = _multiplicity(p, g.den)
        m = mf - k if k >= 2 else mf - 1
        if m > 0:
            e = e * p ** m
    df = _deg(f, t)
    dg = _deg(g, t)
    dy = df - dg if dg >= 0 else df + 1
    bound = max(0, dy + e.degree(t) + 1)
    fn, fd = _upair(f, t)
    gn, gd = _upair(g, t)
    eu = UPoly.from_poly(e, t)
    du = eu.diff()
    one = UPoly.const(t, 1)
    tries = [None]
    if allow_remainder and sqf.degree(t) > 0:
        tries.append(UPoly.from_poly(sqf, t))
    for tu in tries:
        tt = tu if tu is not None else one
        cols = []
        for i in range(bound + 1):
            a = one.shift(i)
            cols.append((a.diff() * eu - a * du) * gd * fd * tt + gn * a * eu * fd * tt)
        if tu is not None:
            for j in range(tu.degree()):
                cols.append(one.shift(j) * eu * eu * gd * fd)
        rhs = fn * eu * eu * gd * tt
        nrows = max([c.degree() for c in cols] + [rhs.degree()]) + 1
        rows = []
        vec = []
        for k in range(nrows):
            rows.append([c.c[k] if k < len(c.c) else _ZERO for c in cols])
            vec.append(rhs.c[k] if k < len(rhs.c) else _ZERO)
        sol = solve_linear(rows, vec, len(cols))
        if sol is None:
            continue
        a = UPoly(t, sol[:bound + 1])
        y = a.to_ratfunc() / RatFunc.make(e)
        rem = _ZERO
        if tu is not None:
            cpoly = UPoly(t, sol[bound + 1:])
            rem = cpoly.to_ratfunc() / tu.to_ratfunc()
        return y, rem
    return None


# ---------------------------------------------------------------- general entry


def _kernel_log_derivative(ea, fs, t):
    """w'/w as a RatFunc for w = exp(ea) * prod(atom^k), or None."""
    out = _ZERO
    if ea is not None and t in free_vars(ea):
        d = try_ratfunc(differentiate(ea, t))
        if d is None:
            return None
        out = out + d
    for atom, k in fs:
        if t not in free_vars(atom):
            continue
        if type(atom) in (Ln, Integral, Exp) or not is_rational_expr(atom):
            return None
        b = to_ratfunc(atom)
        out = out + (b.diff(t) / b).scale(k)
    return out


def integrate(e, t):
    """Antiderivative of e with respect to t (other variables are constants)."""
    e = normalize(e)
    result = Antiderivative(t)
    other = []
    remainder = []
    for ea, fs, c in canonical_terms(e):
        if ea is None and not fs:
            rat, logs, rem = ratint(c, t)
            result.rational = result.rational + rat
            result.logs.extend(logs)
            if not rem.is_zero():
                remainder.append(from_ratfunc(rem))
            continue
        kernel = from_canonical_terms([(ea, fs, RatFunc.const(1))])
        term = from_canonical_terms([(ea, fs, c)])
        if t not in free_vars(kernel):
            rat, logs, rem = ratint(c, t)
            part = [from_ratfunc(rat)] + [Mul((from_ratfunc(cc), Ln(from_ratfunc(RatFunc(p)))))
                                          for cc, p in logs]
            other.append(Mul((kernel, sum_exprs(part))))
            if not rem.is_zero():
                remainder.append(Mul((kernel, from_ratfunc(rem))))
            continue
        g = _kernel_log_derivative(ea, fs, t)
        sol = risch_de(c, g, t) if g is not None else None
        if sol is None:
            remainder.append(term)
            continue
        y, rem = sol
        other.append(Mul((kernel, from_ratfunc(y))))
        if not rem.is_zero():
            remainder.append(Mul((kernel, from_ratfunc(rem))))
    result.logs = _merge_logs(result.logs)
    result.other = normalize(sum_exprs(other))
    result.remainder = normalize(sum_exprs(remainder))
    return result


def _merge_logs(logs):
    merged = {}
    order = []
    for c, p in logs:
        if p in merged:
            merged[p] = merged[p] + c
        else:
            merged[p] = c
            order.append(p)
    return [(merged[p], p) for p in order if not merged[p].is_zero()]


def antiderivative(e, t, lower=None):
    """Expr F with dF/dt = e (inert Integral for the non-elementary part)."""
    return integrate(e, t).to_expr(lower)
