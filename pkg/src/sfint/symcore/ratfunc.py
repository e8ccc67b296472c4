"""Rational functions as normalized pairs of Polys."""

from .poly import Poly, poly_exquo, poly_gcd, poly_str
from .rat import ONE, rat


class RatFunc:
    """num/den with gcd(num, den) = 1, den integral primitive, positive graded-lex LC.

    Build through ``RatFunc.make`` (normalizes) unless the pair is already
    known to be canonical.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        self.num = num
        self.den = Poly.const(1) if den is None else den

    @classmethod
    def make(cls, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            return cls(num.trim(), Poly.const(1))
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            return cls(Poly.const(0), Poly.const(1))
        if not den.is_const():
            g = poly_gcd(num, den)
            if not g.is_const():
                num = poly_exquo(num, g)
                den = poly_exquo(den, g)
        c, den = den.primitive()
        if c != 1:
            num = num.scale(1 / c)
        return cls(num.trim(), den.trim())

    @classmethod
    def const(cls, c):
        return cls(Poly.const(c), Poly.const(1))

    @classmethod
    def var(cls, name):
        return cls(Poly.var(name), Poly.const(1))

    @staticmethod
    def coerce(x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return RatFunc(x.trim(), Poly.const(1))
        return RatFunc.const(x)

    # queries ---------------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        return self.den.is_const()

    def is_const(self):
        return self.num.is_const() and self.den.is_const()

    def const_value(self):
        return self.num.const_value() / self.den.const_value()

    def variables(self):
        from .poly import sort_vars
        return sort_vars(self.num.variables() + self.den.variables())

    def depends_on(self, v):
        return v in self.num.variables() or v in self.den.variables()

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = RatFunc.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RatFunc.make(self.num + other.num, self.den)
        if self.den.is_const() and other.den.is_const():
            return RatFunc.make(self.num * other.den + other.num * self.den, self.den * other.den)
        return RatFunc.make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) + (-self)

    def __mul__(self, other):
        other = RatFunc.coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFunc.const(0)
        if self.den.is_const() and other.den.is_const():
            return RatFunc.make(self.num * other.num, self.den * other.den)
        # cross-cancel first to keep sizes down
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        a = poly_exquo(self.num, g1) if not g1.is_const() else self.num
        d2 = poly_exquo(other.den, g1) if not g1.is_const() else other.den
        b = poly_exquo(other.num, g2) if not g2.is_const() else other.num
        d1 = poly_exquo(self.den, g2) if not g2.is_const() else self.den
        num = a * b
        den = d1 * d2
        c, den = den.primitive()
        return RatFunc(num.scale(1 / c).trim(), den.trim())

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc.make(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFunc.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n) if n else RatFunc.const(1)

    def scale(self, c):
        c = rat(c)
        if c == 0:
            return RatFunc.const(0)
        return RatFunc(self.num.scale(c), self.den)

    # comparison ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def equals(self, other):
        """Cross-multiplication identity (does not rely on canonical form)."""
        other = RatFunc.coerce(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    # calculus --------------------------------------------------------------

    def diff(self, v):
        dn = self.num.diff(v)
        dd = self.den.diff(v)
        if dd.is_zero():
            if dn.is_zero():
                return RatFunc.const(0)
            return RatFunc(dn.trim(), self.den)
        return RatFunc.make(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, mapping):
        """Substitute RatFuncs/Polys/numbers for variables."""
        mapping = {k: RatFunc.coerce(v) for k, v in mapping.items()}
        if all(m.is_poly() for m in mapping.values()):
            pm = {k: m.num.scale(1 / m.den.const_value()) for k, m in mapping.items()}
            return RatFunc.make(self.num.subs(pm), self.den.subs(pm))
        return subs_poly(self.num, mapping) / subs_poly(self.den, mapping)

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        return self.num.evaluate(point) / d

    def __str__(self):
        return ratfunc_str(self)

    def __repr__(self):
        return f"RatFunc({ratfunc_str(self)!r})"


def subs_poly(p, mapping):
    """Substitute RatFuncs into a Poly, returning a RatFunc."""
    mapping = {k: RatFunc.coerce(v) for k, v in mapping.items() if k in p.gens}
    if not mapping:
        return RatFunc.coerce(p)
    # common denominator per variable power: evaluate term by term
    result = RatFunc.const(0)
    keep = [g for g in p.gens if g not in mapping]
    cache = {}
    for e, c in p.terms.items():
        t = RatFunc.const(c)
        mono = {}
        for g, k in zip(p.gens, e):
            if not k:
                continue
            if g in mapping:
                key = (g, k)
                if key not in cache:
                    cache[key] = mapping[g] ** k
                t = t * cache[key]
            else:
                mono[g] = k
        if mono:
            gens = tuple(keep)
            t = t * Poly(gens, {tuple(mono.get(g, 0) for g in gens): ONE})
        result = result + t
    return result


def _paren(s):
    return f"({s})"


def ratfunc_str(r):
    num = poly_str(r.num)
    if r.den.is_const():
        return num
    den = poly_str(r.den)
    if len(r.num) > 1:
        num = _paren(num)
    single = len(r.den) == 1 and r.den.lead_coeff() == 1 and len(r.den.variables()) == 1
    if not single:
        den = _paren(den)
    return f"{num}/{den}"
