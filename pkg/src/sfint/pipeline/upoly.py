"""Univariate polynomials in one variable over the field Q(other variables).

Coefficients are RatFunc objects.  This is the arithmetic used by the
integration routines, where the integration variable is distinguished and
everything else (parameters of the ODE) is carried symbolically.
"""

from ..symcore.poly import Poly
from ..symcore.ratfunc import RatFunc

_ZERO = RatFunc.const(0)
_ONE = RatFunc.const(1)


class UPoly:
    __slots__ = ("var", "c")

    def __init__(self, var, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.var = var
        self.c = cs

    # conversion ---------------------------------------------------------------

    @classmethod
    def from_poly(cls, p, var):
        cmap = p.coeff_map((var,))
        if not cmap:
            return cls(var, [])
        n = max(e[0] for e in cmap)
        cs = [_ZERO] * (n + 1)
        for (k,), c in cmap.items():
            cs[k] = RatFunc.make(c.trim())
        return cls(var, cs)

    @classmethod
    def const(cls, var, r):
        return cls(var, [RatFunc.coerce(r)])

    def to_ratfunc(self):
        t = RatFunc.var(self.var)
        out = _ZERO
        for c in reversed(self.c):
            out = out * t + c
        return out

    def to_poly(self):
        """Primitive polynomial proportional to self (denominators cleared)."""
        r = self.to_ratfunc()
        return r.num.primitive()[1] if not r.is_zero() else Poly.const(0)

    # queries ------------------------------------------------------------------

    def is_zero(self):
        return not self.c

    def degree(self):
        return len(self.c) - 1 if self.c else -1

    def lc(self):
        return self.c[-1] if self.c else _ZERO

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.c == other.c

    # arithmetic ---------------------------------------------------------------

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        a = self.c + [_ZERO] * (n - len(self.c))
        b = o.c + [_ZERO] * (n - len(o.c))
        return UPoly(self.var, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return UPoly(self.var, [-x for x in self.c])

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, RatFunc):
            return self.scale(o)
        if not self.c or not o.c:
            return UPoly(self.var, [])
        out = [_ZERO] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(o.c):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return UPoly(self.var, out)

    def scale(self, r):
        r = RatFunc.coerce(r)
        return UPoly(self.var, [x * r for x in self.c])

    def shift(self, k):
        return UPoly(self.var, [_ZERO] * k + self.c)

    def diff(self):
        return UPoly(self.var, [c.scale(i) for i, c in enumerate(self.c)][1:])

    def monic(self):
        if not self.c:
            return self
        return self.scale(self.lc().inverse())

    def divmod(self, d):
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        r = list(self.c)
        q = [_ZERO] * max(len(r) - len(d.c) + 1, 0)
        inv = d.lc().inverse()
        dd = d.degree()
        while len(r) - 1 >= dd and r:
            k = len(r) - 1 - dd
            f = r[-1] * inv
            q[k] = f
            for i, c in enumerate(d.c):
                r[k + i] = r[k + i] - f * c
            r.pop()
            while r and r[-1].is_zero():
                r.pop()
        return UPoly(self.var, q), UPoly(self.var, r)

    def __floordiv__(self, d):
        return self.divmod(d)[0]

    def __mod__(self, d):
        return self.divmod(d)[1]

    def exquo(self, d):
        q, r = self.divmod(d)
        if not r.is_zero():
            raise ValueError("inexact univariate division")
        return q

    def __repr__(self):
        return f"UPoly({self.var}: {[str(c) for c in self.c]})"


def ugcd(a, b):
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def ugcdex(a, b):
    """(s, t, g) with s*a + t*b = g = monic gcd(a, b)."""
    var = a.var
    r0, r1 = a, b
    s0, s1 = UPoly.const(var, 1), UPoly(var, [])
    t0, t1 = UPoly(var, []), UPoly.const(var, 1)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    inv = r0.lc().inverse()
    return s0.scale(inv), t0.scale(inv), r0.scale(inv)


def solve_bezout(a, b, c):
    """(s, t) with s*a + t*b = c and deg s < deg b, assuming gcd(a, b) = 1."""
    s, t, g = ugcdex(a, b)
    if g.degree() != 0:
        raise ValueError("arguments are not coprime")
    s = (s * c) % b
    t = (c - s * a).exquo(b)
    return s, t


def _rref(m, nvars):
    pivots = []
    row = 0
    for col in range(nvars):
        if row == len(m):
            break
        piv = None
        for i in range(row, len(m)):
            if not m[i][col].is_zero():
                if piv is None or _size(m[i][col]) < _size(m[piv][col]):
                    piv = i
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col].inverse()
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    return m, pivots


def solve_linear(rows, rhs, nvars):
    """Particular solution of a linear system over Q(params), or None.

    rows: list of lists of RatFunc; free unknowns are set to zero.
    """
    m, pivots = _rref([list(r) + [b] for r, b in zip(rows, rhs)], nvars)
    for i in range(len(pivots), len(m)):
        if not m[i][nvars].is_zero():
            return None
    sol = [_ZERO] * nvars
    for i, col in enumerate(pivots):
        sol[col] = m[i][nvars]
    return sol


def nullspace(rows, nvars):
    """Basis of the solutions of rows * v = 0, one vector per free unknown."""
    m, pivots = _rref([list(r) for r in rows], nvars)
    basis = []
    for f in range(nvars):
        if f in pivots:
            continue
        v = [_ZERO] * nvars
        v[f] = RatFunc.const(1)
        for i, col in enumerate(pivots):
            v[col] = -m[i][f]
        basis.append(v)
    return basis


def _size(r):
    return len(r.num) + len(r.den)
