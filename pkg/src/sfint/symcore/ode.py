"""Rational second-order ODE z' = M/N with z = y'."""

from .expr import as_expr, normalize, to_ratfunc
from .poly import Poly, poly_exquo, poly_gcd
from .ratfunc import RatFunc

XYZ = ("x", "y", "z")


class Ode2:
    """y'' = M(x, y, z)/N(x, y, z) with z = y'.  M and N are made coprime."""

    __slots__ = ("m", "n")

    def __init__(self, m, n=None):
        m = _as_poly(m)
        n = Poly.const(1) if n is None else _as_poly(n)
        if n.is_zero():
            raise ValueError("N must be nonzero")
        for p in (m, n):
            extra = set(p.variables()) - set(XYZ)
            if extra:
                raise ValueError(f"ODE coefficients may only use x, y, z (got {sorted(extra)})")
        r = RatFunc.make(m, n)
        self.m = r.num
        self.n = r.den

    @classmethod
    def from_phi(cls, phi):
        r = phi if isinstance(phi, RatFunc) else to_ratfunc(normalize(as_expr(phi)))
        return cls(r.num, r.den)

    @property
    def phi(self):
        return RatFunc(self.m, self.n)

    def __eq__(self, other):
        return isinstance(other, Ode2) and self.m == other.m and self.n == other.n

    def __hash__(self):
        return hash((self.m, self.n))

    def __repr__(self):
        return f"Ode2(M={self.m}, N={self.n})"


def _as_poly(p):
    if isinstance(p, Poly):
        return p
    if isinstance(p, RatFunc):
        if not p.is_poly():
            raise ValueError("expected a polynomial")
        return p.num.scale(1 / p.den.const_value())
    if isinstance(p, str):
        from .parse import parse_expr
        p = parse_expr(p)
    r = to_ratfunc(normalize(as_expr(p)))
    if not r.is_poly():
        raise ValueError("expected a polynomial")
    return r.num.scale(1 / r.den.const_value())


def coprime_pair(m, n):
    g = poly_gcd(m, n)
    if g.is_const():
        return m, n
    return poly_exquo(m, g), poly_exquo(n, g)
