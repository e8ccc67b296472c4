"""End-to-end search for a first integral, plus the general-solution attempt."""

import time
from dataclasses import asdict, dataclass, field

from ..detsys import build_dx
from ..symcore.expr import Const, Exp, Expr, Integral, Var, free_vars, from_ratfunc, is_zero, normalize
from ..symcore.ratfunc import RatFunc
from .ode1 import D_MAX, SolveTrace, solve_1ode
from .reduce import EliminationFailed, compose_first_integral, reduce_characteristic, solve_for
from .search import SearchOptions, SearchTrace, sfunction_search
from .sfunctions import DegenerateS, associated_1odes, complete_sfunctions
from .verify import AllPointsDegenerate, ConstantResult, verify_first_integral


def _s(v):
    return None if v is None else str(v)


@dataclass
class Report:
    ode: dict
    options: dict
    stages: list = field(default_factory=list)
    s_functions: dict = field(default_factory=lambda: {"s1": None, "s2": None, "s3": None})
    associated_odes: list = field(default_factory=list)
    h_functions: list = field(default_factory=list)
    reduced_ode: str = None
    first_integral: str = None
    verification: dict = None
    exit: int = 1

    def stage(self, name, status, output, started):
        millis = int((time.perf_counter() - started) * 1000)
        self.stages.append({"name": name, "status": status, "output": output, "millis": millis})

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, d):
        return cls(**d)


def without_timing(d):
    """A report dict with the wall-clock fields removed."""
    d = dict(d)
    d["stages"] = [{k: v for k, v in s.items() if k != "millis"} for s in d.get("stages", [])]
    return d


def sfunction_sets(ode, opts, trace=None):
    """Completed (possibly partial) S-function sets for every S found."""
    out = []
    for k, s in sfunction_search(ode, opts, trace):
        try:
            out.append(complete_sfunctions(ode, k, s))
        except DegenerateS as exc:
            out.append(exc.partial)
    return out


def hfunction(ode, sset, k, d_max=D_MAX, seed=0, trace=None):
    """Verified H-function of the k-th associated 1ODE, or None."""
    o = associated_1odes(ode, sset)[k - 1]
    if o is None:
        return None
    return solve_1ode(o, k, d_max=d_max, trace=trace, seed=seed)


def pdeassol(ode, h, d_max=D_MAX, seed=0, trace=None):
    """(Reduction, solution F(t, h) of the reduced ODE or None)."""
    red = reduce_characteristic(ode, h.expr, h.k)
    if red.ode.rhs_ratfunc is not None and red.ode.rhs_ratfunc.is_zero():
        return red, Var("h")
    f = solve_1ode(red.ode, d_max=d_max, trace=trace, seed=seed)
    return red, None if f is None else f.expr


def invade(ode, opts=None, d_max=D_MAX, seed=0):
    """Run search, completion, 1ODE solving, reduction and composition; always returns a Report."""
    opts = opts or SearchOptions()
    rep = Report({"M": str(ode.m), "N": str(ode.n)}, opts.to_json())
    started = time.perf_counter()
    strace = SearchTrace()
    sets = sfunction_sets(ode, opts, strace)
    rep.stage("sfunction", "found" if sets else "failed", strace.attempts, started)
    if not sets:
        return rep
    for sset in sets:
        rep.s_functions = {"s1": _s(sset.s1), "s2": _s(sset.s2), "s3": _s(sset.s3)}
        odes = associated_1odes(ode, sset)
        rep.associated_odes = [_s(o) for o in odes]
        for k in opts.equations():
            if odes[k - 1] is None:
                rep.stages.append({"name": f"hfunction[{k}]", "status": "missing S", "output": None,
                                   "millis": 0})
                continue
            i = _attempt(ode, sset, k, rep, d_max, seed)
            if i is not None:
                rep.exit = 0
                return rep
    return rep


def _attempt(ode, sset, k, rep, d_max, seed):
    started = time.perf_counter()
    tr = SolveTrace()
    h = hfunction(ode, sset, k, d_max, seed, tr)
    rep.stage(f"hfunction[{k}]", "found" if h else "failed", tr.attempts, started)
    if h is None:
        return None
    rep.h_functions.append({"k": k, "H": str(h.expr), "strategy": h.strategy})
    started = time.perf_counter()
    try:
        red, f = pdeassol(ode, h, d_max, seed, tr := SolveTrace())
    except EliminationFailed as exc:
        rep.stage(f"pdeassol[{k}]", "failed", str(exc), started)
        return None
    rep.reduced_ode = str(red.ode)
    rep.stage(f"pdeassol[{k}]", "found" if f is not None else "failed",
              {"reduction": red.to_json(), "F": _s(f), "attempts": tr.attempts}, started)
    if f is None:
        return None
    started = time.perf_counter()
    try:
        i = compose_first_integral(f, h.expr, seed)
        ver = verify_first_integral(ode, i, seed=seed)
    except (ConstantResult, AllPointsDegenerate) as exc:
        rep.stage(f"compose[{k}]", "failed", str(exc), started)
        return None
    rep.stage(f"verify[{k}]", "passed" if ver.passed else "failed", ver.to_json(), started)
    if not ver.passed:
        return None
    rep.first_integral = str(i)
    rep.verification = {"method": ver.method, "points": ver.points,
                        "max_abs_residual": ver.max_abs_residual}
    return i


# ---------------------------------------------------------------- general solution

GENSOL_POINTS = 5


@dataclass(frozen=True)
class GeneralSolution:
    """dy/dx = z(x, y, C) from I = C, and its H-function G(x, y, C) = K."""

    first_order: object
    implicit: object
    explicit: object = None

    def to_json(self):
        return {"first_order": str(self.first_order), "implicit": f"{self.implicit} = K",
                "explicit": None if self.explicit is None else f"y = {self.explicit}"}


def gensol(ode, i, d_max=D_MAX, seed=0, points=GENSOL_POINTS):
    """Best-effort general solution from a first integral, or None.

    The H-function of dy/dx = z(x, y, C) often nests unevaluated integrals,
    whose numeric check needs nested quadrature, so fewer points are used.
    """
    from .sfunctions import Ode1

    i = normalize(i)
    z_of = solve_for(i, "z", "C")
    if z_of is None or "z" in free_vars(z_of):
        return None
    o = Ode1(z_of, "y", "x", "C")
    h = solve_1ode(o, d_max=d_max, seed=seed, points=points)
    if h is None:
        return None
    y_of = solve_for(h.expr, "y", "K")
    return GeneralSolution(o, h.expr, y_of)


def nonlocal_symmetry_form(s):
    """Display form exp(int(-S, x)) of the nonlocal symmetry built from S."""
    s = normalize(s) if isinstance(s, Expr) else from_ratfunc(RatFunc.coerce(s))
    if is_zero(s):
        return Const(1)
    return Exp(Integral(normalize(-s), "x"))


def dx_apply(ode, e):
    return build_dx(ode)(e)
