"""High-precision evaluation of Expr trees.

Evaluation runs in mpmath interval arithmetic on a private context, so the
returned midpoint comes with a rigorous enclosure (except for inert
integrals, which are computed by tanh-sinh quadrature and carry the
quadrature error estimate instead).
"""

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from fractions import Fraction

import sympy

from .expr import (
    Add, Const, Exp, Integral, Ln, Mul, Pow, Var, canonical_terms, free_vars, is_rational_expr,
    to_ratfunc, try_ratfunc,
)
from .rat import rat


class PoleAtPoint(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


class InertNodeError(ValueError):
    pass


class PrecisionLoss(ArithmeticError):
    pass


def _bits(digits):
    return int(digits * 3.3220) + 40


class _IntervalEval:
    def __init__(self, point, prec, quadrature):
        self.ctx = MPIntervalContext()
        self.ctx.prec = prec
        self.prec = prec
        self.quadrature = quadrature
        self.point = {k: rat(v) for k, v in point.items()}
        self.values = {}
        self.quad_error = 0

    def value_of(self, name):
        if name not in self.values:
            if name not in self.point:
                raise KeyError(f"no value for variable {name}")
            q = self.point[name]
            self.values[name] = self.ctx.mpf(int(q.numerator)) / self.ctx.mpf(int(q.denominator))
        return self.values[name]

    def ev(self, e):
        ctx = self.ctx
        t = type(e)
        if t is Const:
            return ctx.mpf(int(e.value.numerator)) / ctx.mpf(int(e.value.denominator))
        if t is Var:
            return self.value_of(e.name)
        if t is Add:
            total = ctx.mpf(0)
            for a in e.args:
                total = total + self.ev(a)
            return total
        if t is Mul:
            total = ctx.mpf(1)
            for a in e.args:
                total = total * self.ev(a)
            return total
        if t is Pow:
            b = self.ev(e.base)
            k = e.exp
            if k.denominator == 1:
                n = int(k)
                if n < 0 and _contains_zero(b):
                    raise PoleAtPoint("division by a value enclosing zero")
                if n < 0:
                    return 1 / (b ** (-n))
                return b ** n
            if endpoints(b)[0] <= 0:
                raise DomainError("non-integer power of a nonpositive value")
            return ctx.exp(ctx.log(b) * (ctx.mpf(int(k.numerator)) / ctx.mpf(int(k.denominator))))
        if t is Exp:
            return ctx.exp(self.ev(e.arg))
        if t is Ln:
            a = self.ev(e.arg)
            lo, hi = endpoints(a)
            if hi <= 0:
                raise DomainError("logarithm of a nonpositive value")
            if lo <= 0:
                raise PoleAtPoint("logarithm argument encloses zero")
            return ctx.log(a)
        if t is Integral:
            if not self.quadrature:
                raise InertNodeError("inert integral cannot be evaluated without quadrature")
            return self.integral(e)
        raise TypeError(t)

    def integral(self, e):
        upper = self.ev(e.upper)
        m = mpmath.MPContext()
        m.prec = self.prec
        inner = _FloatEval(m, {k: v for k, v in self.point.items() if k != e.var})
        lo = m.mpf(int(e.lower.numerator)) / int(e.lower.denominator)
        ulo, uhi = endpoints(upper, m)
        hi = (ulo + uhi) / 2
        if lo == hi:
            return self.ctx.mpf(0)
        self.check_path(e, min(lo, ulo), max(lo, uhi))

        def f(s):
            return inner.ev_with(e.integrand, e.var, s)

        val, err = m.quad(f, [lo, hi], error=True)
        err = abs(err) + abs(val) * m.mpf(2) ** (-self.prec + 20)
        self.quad_error = max(self.quad_error, err)
        return self.ctx.mpf([val - err, val + err])


    def check_path(self, e, a, b):
        """Refuse to integrate across a zero of a denominator or log/root argument."""
        others = {k: v for k, v in self.point.items() if k != e.var}
        s = sympy.Symbol("s")
        lo, hi = _to_rational(a), _to_rational(b)
        for p in guard_polys(e.integrand):
            q = p.subs({k: v for k, v in others.items() if k in p.gens}).trim()
            if q.is_zero():
                raise PoleAtPoint("integrand is singular along the whole path")
            if e.var not in q.variables():
                continue
            if set(q.variables()) - {e.var}:
                raise InertNodeError("integrand depends on unassigned variables")
            coeffs = {}
            i = q.gens.index(e.var)
            for exp, c in q.terms.items():
                coeffs[exp[i]] = sympy.Rational(int(c.numerator), int(c.denominator))
            sp = sympy.Poly.from_dict({(k,): c for k, c in coeffs.items()}, s)
            if sp.count_roots(lo, hi) > 0:
                raise PoleAtPoint("integration path crosses a singularity")


def _to_rational(v):
    sign, man, e, _ = v._mpf_
    f = Fraction(-int(man) if sign else int(man)) * (Fraction(2) ** int(e))
    return sympy.Rational(f.numerator, f.denominator)


def guard_polys(e):
    """Polynomials whose zeros make e singular (denominators, log and root arguments)."""
    polys, _ = collect_guards(e)
    return polys


def collect_guards(*exprs):
    """(polynomials that must stay nonzero, rational exp arguments) of the expressions."""
    polys, exps = [], []
    for e in exprs:
        _guards(e, polys, exps)
    uniq = []
    for p in polys:
        if not p.is_const() and p not in uniq:
            uniq.append(p)
    return uniq, exps


def _guards(e, polys, exps):
    for ea, fs, c in canonical_terms(e):
        if not c.den.is_const():
            polys.append(c.den)
        if ea is not None:
            r = try_ratfunc(ea)
            if r is not None:
                exps.append(r)
                if not r.den.is_const():
                    polys.append(r.den)
            else:
                _guards(ea, polys, exps)
        for atom, _ in fs:
            if type(atom) is Ln:
                r = try_ratfunc(atom.arg)
                if r is not None:
                    polys.append(r.num)
                    if not r.den.is_const():
                        polys.append(r.den)
                else:
                    _guards(atom.arg, polys, exps)
            elif type(atom) is Integral:
                _guards(atom.upper, polys, exps)
            elif type(atom) is not Exp and is_rational_expr(atom):
                r = to_ratfunc(atom)
                polys.append(r.num)
                if not r.den.is_const():
                    polys.append(r.den)
            else:
                _guards(atom, polys, exps)


def _contains_zero(iv):
    lo, hi = endpoints(iv)
    return lo <= 0 <= hi


class _FloatEval:
    """Plain mpmath evaluation, used inside quadrature."""

    def __init__(self, m, point):
        self.m = m
        self.base = {k: m.mpf(int(v.numerator)) / int(v.denominator) for k, v in point.items()}

    def ev_with(self, e, var, s):
        env = dict(self.base)
        env[var] = s
        return self.ev(e, env)

    def ev(self, e, env):
        m = self.m
        t = type(e)
        if t is Const:
            return m.mpf(int(e.value.numerator)) / int(e.value.denominator)
        if t is Var:
            return env[e.name]
        if t is Add:
            return m.fsum(self.ev(a, env) for a in e.args)
        if t is Mul:
            total = m.mpf(1)
            for a in e.args:
                total *= self.ev(a, env)
            return total
        if t is Pow:
            b = self.ev(e.base, env)
            k = e.exp
            if k.denominator == 1:
                n = int(k)
                if n < 0 and b == 0:
                    raise PoleAtPoint("division by zero inside integrand")
                return b ** n
            if b <= 0:
                raise DomainError("non-integer power of a nonpositive value")
            return m.exp(m.log(b) * m.mpf(int(k.numerator)) / int(k.denominator))
        if t is Exp:
            return m.exp(self.ev(e.arg, env))
        if t is Ln:
            a = self.ev(e.arg, env)
            if a <= 0:
                raise DomainError("logarithm of a nonpositive value")
            return m.log(a)
        if t is Integral:
            hi = self.ev(e.upper, env)
            lo = m.mpf(int(e.lower.numerator)) / int(e.lower.denominator)
            sub = dict(env)

            def f(s):
                sub[e.var] = s
                return self.ev(e.integrand, sub)

            return m.quad(f, [lo, hi])
        raise TypeError(t)


def eval_interval(e, point, precision_digits=50, quadrature=False):
    """Interval enclosure of e at point (an mpmath ivmpf)."""
    missing = free_vars(e) - set(point)
    if missing:
        raise KeyError(f"point does not assign {sorted(missing)}")
    ev = _IntervalEval(point, _bits(precision_digits), quadrature)
    return ev.ev(e)


def eval_numeric(e, point, precision_digits=50, quadrature=False):
    """Value of e at a rational point, correct to about precision_digits - 10 digits.

    Raises PoleAtPoint, DomainError, or InertNodeError (integral nodes
    without ``quadrature=True``).
    """
    if precision_digits < 30:
        raise ValueError("precision_digits must be at least 30")
    missing = free_vars(e) - set(point)
    if missing:
        raise KeyError(f"point does not assign {sorted(missing)}")
    prec = _bits(precision_digits)
    for _ in range(4):
        out = mpmath.MPContext()
        out.prec = prec + 10
        ev = _IntervalEval(point, prec, quadrature)
        lo, hi = endpoints(ev.ev(e), out)
        target = out.mpf(10) ** (-(precision_digits - 10))
        if hi - lo <= target * max(abs(lo), abs(hi), 1):
            break
        prec *= 2
    return (lo + hi) / 2


def endpoints(iv, ctx=None):
    """Exact (lower, upper) endpoints of an interval value as mpf."""
    ctx = ctx or mpmath.mp
    a, b = iv._mpi_
    return ctx.make_mpf(a), ctx.make_mpf(b)
