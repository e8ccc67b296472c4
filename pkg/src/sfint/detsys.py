"""Determining equations for S-functions.

The residuals are the cleared numerators of the Riccati-type PDEs satisfied
by S1 = I_y/I_z, S2 = I_x/I_z and S3 = I_x/I_y when the candidate S is a
ratio P/E of polynomials.  With E = N the S1 and S2 residuals are used in
their reduced form (the common factor N^2 removed).
"""

from dataclasses import dataclass
from math import comb

from .symcore.expr import Expr, as_expr, differentiate, normalize, to_ratfunc
from .symcore.ode import XYZ, Ode2
from .symcore.poly import Poly
from .symcore.ratfunc import RatFunc

X, Y, Z = (Poly.var(v) for v in XYZ)


class DxOperator:
    """D_x = d/dx + z d/dy + (M/N) d/dz for a fixed ODE."""

    def __init__(self, ode):
        self.ode = ode
        self.m = ode.m
        self.n = ode.n

    def cleared(self, p):
        """D[p] = N p_x + z N p_y + M p_z for a Poly p."""
        n = self.n
        return n * p.diff("x") + Z * n * p.diff("y") + self.m * p.diff("z")

    def on_ratfunc(self, r):
        r = RatFunc.coerce(r)
        return r.diff("x") + RatFunc.var("z") * r.diff("y") + self.ode.phi * r.diff("z")

    def __call__(self, e):
        e = as_expr(e)
        phi = as_expr(self.ode.phi)
        from .symcore.expr import Add, Mul, Var
        return normalize(Add((
            differentiate(e, "x"),
            Mul((Var("z"), differentiate(e, "y"))),
            Mul((phi, differentiate(e, "z"))),
        )))


def build_dx(ode):
    return DxOperator(ode)


@dataclass(frozen=True)
class Ansatz:
    poly: Poly
    degree: int
    unknowns: tuple
    monomials: tuple


def monomials_upto(degree):
    """Exponent triples (i, j, k) with i + j + k <= degree: by degree, then x > y > z."""
    out = []
    for d in range(degree + 1):
        block = []
        for i in range(d + 1):
            for j in range(d - i + 1):
                block.append((i, j, d - i - j))
        block.sort(reverse=True)
        out.extend(block)
    return out


def make_ansatz(degree, prefix="a"):
    """Generic polynomial of total degree <= degree in x, y, z with fresh unknowns."""
    if degree < 0:
        raise ValueError("ansatz degree must be nonnegative")
    monos = monomials_upto(degree)
    unknowns = tuple(f"{prefix}{i}" for i in range(len(monos)))
    gens = XYZ + unknowns
    n = len(unknowns)
    terms = {}
    for idx, (i, j, k) in enumerate(monos):
        e = [0] * n
        e[idx] = 1
        terms[(i, j, k) + tuple(e)] = 1
    poly = Poly.from_dict(gens, terms)
    assert len(unknowns) == comb(degree + 3, 3)
    return Ansatz(poly, degree, unknowns, tuple(monos))


def degree_bound(ode):
    """max(total degree of M minus 1, total degree of N)."""
    return max(ode.m.total_degree() - 1, ode.n.total_degree(), 0)


@dataclass(frozen=True)
class DetResidual:
    residual: Poly
    kind: str
    denominator_used: Poly
    unknowns: tuple = ()


def _poly_of(p):
    if isinstance(p, Ansatz):
        return p.poly, p.unknowns
    if isinstance(p, Poly):
        return p, ()
    if isinstance(p, Expr):
        p = to_ratfunc(p)
    r = RatFunc.coerce(p)
    if not r.is_poly():
        raise ValueError("numerator must be a polynomial")
    return r.num.scale(1 / r.den.const_value()), ()


def _denom(ode, denom):
    if denom is None:
        return ode.n
    d = denom if isinstance(denom, Poly) else _poly_of(denom)[0]
    if d.is_zero():
        raise ZeroDivisionError("zero denominator for S-function candidate")
    return d


def _derivs(ode):
    m, n = ode.m, ode.n
    return {
        "mx": m.diff("x"), "my": m.diff("y"), "mz": m.diff("z"),
        "nx": n.diff("x"), "ny": n.diff("y"), "nz": n.diff("z"),
    }


def residual_s1(ode, P, denom=None):
    """Cleared residual of D_x[S] = S^2 + phi_z S - phi_y for S = P/denom."""
    p, unknowns = _poly_of(P)
    e = _denom(ode, denom)
    m, n = ode.m, ode.n
    d = _derivs(ode)
    D = build_dx(ode).cleared
    if e == n:
        res = -(p * p) - (d["nx"] + Z * d["ny"] + d["mz"]) * p + D(p) - m * d["ny"] + d["my"] * n
    else:
        res = (n * (e * D(p) - p * D(e)) - (n * p) * (n * p)
               - (d["mz"] * n - m * d["nz"]) * p * e + (d["my"] * n - m * d["ny"]) * (e * e))
    return DetResidual(res, "S1", e, unknowns)


def residual_s2(ode, Q, denom=None):
    """Cleared residual of D_x[S] = -S^2/z + (phi_z - phi/z) S - phi_x for S = Q/denom."""
    q, unknowns = _poly_of(Q)
    e = _denom(ode, denom)
    m, n = ode.m, ode.n
    d = _derivs(ode)
    D = build_dx(ode).cleared
    if e == n:
        res = (q * q - (d["ny"] * Z * Z + (d["mz"] + d["nx"]) * Z - m) * q
               - (m * d["nx"] - d["mx"] * n - D(q)) * Z)
    else:
        res = (Z * n * (e * D(q) - q * D(e)) + (n * q) * (n * q)
               - (Z * (d["mz"] * n - m * d["nz"]) - m * n) * q * e
               + Z * (d["mx"] * n - m * d["nx"]) * (e * e))
    return DetResidual(res, "S2", e, unknowns)


def residual_s3(ode, T, denom=None):
    """Cleared residual of phi D_x[S] = -phi_y S^2 + (phi_x - z phi_y) S + z phi_x for S = T/denom.

    This PDE follows from the S1 equation through S1 = -phi/(S + z).
    """
    t, unknowns = _poly_of(T)
    e = _denom(ode, denom)
    m, n = ode.m, ode.n
    d = _derivs(ode)
    D = build_dx(ode).cleared
    ax = d["mx"] * n - m * d["nx"]
    ay = d["my"] * n - m * d["ny"]
    res = m * (e * D(t) - t * D(e)) + ay * (t * t) - (ax - Z * ay) * t * e - Z * ax * (e * e)
    return DetResidual(res, "S3", e, unknowns)


RESIDUALS = {1: residual_s1, 2: residual_s2, 3: residual_s3}


def extract_system(r):
    """Nonzero coefficients (in the unknowns) of the residual collected over x, y, z."""
    cmap = r.residual.coeff_map(XYZ)
    items = sorted(cmap.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
    return [c.trim() for _, c in items if not c.is_zero()]


def substitute_solution(ansatz, values):
    """Ansatz polynomial with unknowns replaced by rational values (missing -> 0)."""
    vals = {u: values.get(u, 0) for u in ansatz.unknowns}
    return ansatz.poly.subs(vals).trim()
