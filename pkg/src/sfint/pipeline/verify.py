"""Numeric and exact verification of first integrals and related identities."""

import random
from dataclasses import dataclass

import mpmath

from ..detsys import build_dx
from ..symcore.expr import (
    Add, Mul, Var, differentiate, differentiate_raw, free_vars, from_ratfunc, is_zero, normalize,
    try_ratfunc,
)
from ..symcore.numeric import (
    DomainError, InertNodeError, PoleAtPoint, collect_guards, eval_numeric,
)
from ..symcore.rat import rat
from ..symcore.ratfunc import RatFunc

TOL = mpmath.mpf("1e-30")
NEAR_POLE = rat(1, 1000)
EXP_LIMIT = 40
XYZ = ("x", "y", "z")


class AllPointsDegenerate(RuntimeError):
    pass


class ConstantResult(ValueError):
    pass


@dataclass
class Verification:
    method: str
    points: int
    max_abs_residual: str
    passed: bool
    nonconstant: bool = True
    reason: str = ""

    def to_json(self):
        return {"method": self.method, "points": self.points,
                "max_abs_residual": self.max_abs_residual, "passed": self.passed,
                "nonconstant": self.nonconstant, "reason": self.reason}


# ---------------------------------------------------------------- sampling


def random_rational(rng):
    den = rng.randint(1, 100)
    lim = min(100, 2 * den)
    return rat(rng.randint(-lim, lim), den)


class Sampler:
    """Seeded source of pole-safe rational sample points."""

    def __init__(self, variables, exprs, seed=0):
        self.variables = tuple(variables)
        self.rng = random.Random(seed)
        self.polys, self.exps = collect_guards(*[normalize(e) for e in exprs])

    def admissible(self, point):
        for p in self.polys:
            if abs(p.evaluate(point)) < NEAR_POLE:
                return False
        for r in self.exps:
            if abs(r.evaluate(point)) > EXP_LIMIT:
                return False
        return True

    def draw(self):
        while True:
            pt = {v: random_rational(self.rng) for v in self.variables}
            if self.admissible(pt):
                return pt


def evaluate_at(exprs, point, digits=50, quadrature=True):
    """Numeric values of several expressions, or None if any is undefined there."""
    out = []
    for e in exprs:
        try:
            out.append(eval_numeric(e, point, digits, quadrature=quadrature))
        except (PoleAtPoint, DomainError, ZeroDivisionError, InertNodeError, ValueError):
            return None
    return out


def sample_values(exprs, needed, variables, guard_exprs=(), seed=0, digits=50, max_tries=None,
                  raw=False):
    """``needed`` (point, values) pairs where all exprs evaluate cleanly."""
    if not raw:
        exprs = [normalize(e) for e in exprs]
    variables = tuple(variables)
    sampler = Sampler(variables, ([] if raw else list(exprs)) + list(guard_exprs), seed)
    max_tries = max_tries or 20 * needed + 200
    got = []
    for _ in range(max_tries):
        pt = sampler.draw()
        vals = evaluate_at(exprs, pt, digits)
        if vals is not None:
            got.append((pt, vals))
            if len(got) == needed:
                return got
    raise AllPointsDegenerate(f"only {len(got)} of {needed} sample points were usable")


def fmt(v):
    return mpmath.nstr(mpmath.mpf(v), 5, min_fixed=0, max_fixed=0) if v != 0 else "0"


# ---------------------------------------------------------------- checks


def raw_dx(ode, e):
    """D_x[e] built by the plain differentiation rules, without simplification."""
    phi = from_ratfunc(ode.phi)
    return Add((
        differentiate_raw(e, "x"),
        Mul((Var("z"), differentiate_raw(e, "y"))),
        Mul((phi, differentiate_raw(e, "z"))),
    ))


def numeric_zero(e, variables, points=100, seed=0, digits=50, tol=TOL, guard_exprs=()):
    """(passed, max |e|, points used) over random samples of the unsimplified e."""
    samples = sample_values([e], points, variables, [normalize(e)] + list(guard_exprs),
                            seed, digits, raw=True)
    worst = max(abs(vals[0]) for _, vals in samples)
    return worst < tol, worst, len(samples)


def is_nonconstant(i, seed=0):
    i = normalize(i)
    grads = [differentiate(i, v) for v in XYZ if v in free_vars(i)]
    grads = [g for g in grads if not is_zero(g)]
    if not grads:
        return False
    try:
        samples = sample_values(grads, 5, XYZ, [i], seed)
    except AllPointsDegenerate:
        return True
    return any(abs(v) > mpmath.mpf("1e-20") for _, vals in samples for v in vals)


def verify_first_integral(ode, i, points=100, seed=0, digits=50, tol=TOL):
    """Check D_x[I] = 0 (exactly when I is rational, else numerically) and I nonconstant."""
    i = normalize(i)
    nonconst = is_nonconstant(i, seed)
    if try_ratfunc(i) is not None:
        res = build_dx(ode)(i)
        ok = is_zero(res) and nonconst
        reason = "" if ok else ("constant" if not nonconst else "D_x[I] is not zero")
        return Verification("exact", 0, "0" if is_zero(res) else "nonzero", ok, nonconst, reason)
    try:
        ok, worst, n = numeric_zero(raw_dx(ode, i), XYZ, points, seed, digits, tol,
                                    guard_exprs=[i, build_dx(ode)(i)])
    except AllPointsDegenerate as exc:
        return Verification("numeric", 0, "nan", False, nonconst, str(exc))
    passed = ok and nonconst
    reason = "" if passed else ("constant" if not nonconst else "residual above tolerance")
    return Verification("numeric", n, fmt(worst), passed, nonconst, reason)


def verify_h_function(o1, h, points=50, seed=0, digits=50, tol=TOL):
    """D_[k][H] = H_indep + rhs * H_dep vanishes numerically."""
    h = normalize(h)
    if o1.dep not in free_vars(h):
        return False, "H does not depend on the dependent variable"
    rhs = o1.rhs_expr
    res = normalize(differentiate(h, o1.indep) + rhs * differentiate(h, o1.dep))
    if try_ratfunc(h) is not None and try_ratfunc(rhs) is not None:
        return is_zero(res), "0" if is_zero(res) else "nonzero"
    raw = Add((differentiate_raw(h, o1.indep), Mul((rhs, differentiate_raw(h, o1.dep)))))
    variables = sorted(free_vars(res) | free_vars(h) | free_vars(rhs))
    try:
        ok, worst, _ = numeric_zero(raw, variables, points, seed, digits, tol, guard_exprs=[h, res])
    except AllPointsDegenerate:
        return False, "no usable sample points"
    return ok, fmt(worst)


def compatibility_residuals(ode, r, s):
    """The three compatibility expressions relating an integrating factor R to S."""
    phi = ode.phi
    r = normalize(r)
    s_e = from_ratfunc(s) if isinstance(s, RatFunc) else normalize(s)
    phi_z = from_ratfunc(phi.diff("z"))
    phi_y = from_ratfunc(phi.diff("y"))
    dxr = raw_dx(ode, r)
    r1 = dxr + r * (s_e + phi_z)
    r2 = s_e * dxr + r * (raw_dx(ode, s_e) + phi_y)
    r3 = -(differentiate_raw(r, "z") * s_e + r * differentiate_raw(s_e, "z")) + differentiate_raw(r, "y")
    return r1, r2, r3


def verify_compatibility(ode, r, s, points=50, seed=0, digits=50, tol=TOL):
    """Max |residual| of each compatibility condition over sample points."""
    rs = compatibility_residuals(ode, r, s)
    out = []
    for k, e in enumerate(rs):
        ok, worst, n = numeric_zero(e, XYZ, points, seed + k, digits, tol, guard_exprs=[r])
        out.append((ok, fmt(worst), n))
    return out


def functionally_dependent(i1, i2, points=20, seed=0, digits=50, tol=mpmath.mpf("1e-25")):
    """Rank-one test of the Jacobian [grad I1; grad I2] at random points."""
    i1, i2 = normalize(i1), normalize(i2)
    g1 = [differentiate_raw(i1, v) for v in XYZ]
    g2 = [differentiate_raw(i2, v) for v in XYZ]
    cross = [
        g1[1] * g2[2] - g1[2] * g2[1],
        g1[2] * g2[0] - g1[0] * g2[2],
        g1[0] * g2[1] - g1[1] * g2[0],
    ]
    guard = [i1, i2] + [differentiate(i, v) for i in (i1, i2) for v in XYZ]
    samples = sample_values(cross, points, XYZ, guard, seed, digits, raw=True)
    worst = max(abs(v) for _, vals in samples for v in vals)
    return worst < tol, fmt(worst)
