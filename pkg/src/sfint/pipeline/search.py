"""Undetermined-coefficient search for rational S-functions."""

from dataclasses import dataclass, field

from ..algsolve import CoeffSystem, solve_rational, specializations
from ..detsys import RESIDUALS, degree_bound, extract_system, make_ansatz, substitute_solution
from ..symcore.expr import as_expr, normalize, to_ratfunc
from ..symcore.poly import Poly
from ..symcore.ratfunc import RatFunc

ALL = "all"


@dataclass(frozen=True)
class SearchOptions:
    sn: object = 1
    deg: int = None
    den: Poly = None
    sfun: RatFunc = None
    en: object = 1
    max_deg_override: int = None

    def __post_init__(self):
        for name in ("sn", "en"):
            v = getattr(self, name)
            if v not in (1, 2, 3, ALL):
                raise ValueError(f"{name} must be 1, 2, 3 or 'all'")
        if self.deg is not None and self.deg < 1:
            raise ValueError("deg must be at least 1")
        if self.max_deg_override is not None and self.max_deg_override < 1:
            raise ValueError("max_deg_override must be at least 1")
        if self.den is not None and self.den.is_zero():
            raise ZeroDivisionError("den must be a nonzero polynomial")

    def kinds(self):
        return (1, 2, 3) if self.sn == ALL else (self.sn,)

    def equations(self):
        return (1, 2, 3) if self.en == ALL else (self.en,)

    def to_json(self):
        return {
            "sn": self.sn, "deg": self.deg,
            "den": None if self.den is None else str(self.den),
            "sfun": None if self.sfun is None else str(self.sfun),
            "en": self.en, "max_deg": self.max_deg_override,
        }


@dataclass
class SearchTrace:
    """Degrees tried per kind, with system sizes and outcomes."""

    attempts: list = field(default_factory=list)

    def add(self, k, degree, equations, branches, accepted):
        self.attempts.append({"k": k, "degree": degree, "equations": equations,
                              "branches": branches, "accepted": accepted})


def as_poly(p):
    if isinstance(p, Poly):
        return p
    if isinstance(p, str):
        from ..symcore.parse import parse_expr
        p = parse_expr(p)
    r = p if isinstance(p, RatFunc) else to_ratfunc(normalize(as_expr(p)))
    if not r.is_poly():
        raise ValueError("expected a polynomial")
    return r.num.scale(1 / r.den.const_value())


def is_sfunction(ode, k, s, den=None):
    """Exact residual test for a candidate S_k (as a RatFunc)."""
    s = RatFunc.coerce(s)
    return RESIDUALS[k](ode, s.num, s.den).residual.is_zero()


def _accept(ode, k, p, den):
    """S = p/den if its residual vanishes identically, else None."""
    if p.is_zero():
        ok = RESIDUALS[k](ode, Poly.const(0), den).residual.is_zero()
        return RatFunc.const(0) if ok else None
    if not RESIDUALS[k](ode, p, den).residual.is_zero():
        return None
    return RatFunc.make(p, den)


def search_degree(ode, k, degree, den=None, trace=None):
    """Accepted S_k from the degree-``degree`` ansatz, in branch order."""
    den = ode.n if den is None else den
    ans = make_ansatz(degree)
    res = RESIDUALS[k](ode, ans, den)
    system = CoeffSystem.make(extract_system(res), ans.unknowns)
    branches = solve_rational(system)
    found = []
    for br in branches:
        for values in specializations(br):
            p = substitute_solution(ans, values)
            s = _accept(ode, k, p, den)
            if s is not None and s not in found:
                found.append(s)
                break
    if trace is not None:
        trace.add(k, degree, len(system.equations), len(branches), len(found))
    return found


def sfunction_search(ode, opts=None, trace=None):
    """List of (k, S_k) found for the requested kinds.

    Degrees run from 1 up to the bound (or exactly ``opts.deg``); the first
    degree that yields an accepted S stops the loop for that kind.
    """
    opts = opts or SearchOptions()
    out = []
    if opts.sfun is not None:
        k = opts.kinds()[0]
        if is_sfunction(ode, k, opts.sfun):
            out.append((k, RatFunc.coerce(opts.sfun)))
        if trace is not None:
            trace.add(k, None, 0, 0, len(out))
        return out
    for k in opts.kinds():
        if opts.deg is not None:
            degrees = [opts.deg]
        else:
            top = opts.max_deg_override or degree_bound(ode)
            degrees = range(1, max(top, 1) + 1)
        for d in degrees:
            found = search_degree(ode, k, d, opts.den, trace)
            if found:
                out.extend((k, s) for s in found)
                break
    return out
