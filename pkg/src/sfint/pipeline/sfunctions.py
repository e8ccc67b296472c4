"""Completing a single S-function to the full set, and the associated 1ODEs."""

from dataclasses import dataclass

from ..symcore.expr import Expr, as_expr, from_ratfunc, normalize, try_ratfunc
from ..symcore.ratfunc import RatFunc

Z = RatFunc.var("z")


class DegenerateS(ArithmeticError):
    """Raised when a member of the S-function set cannot be derived.

    ``partial`` holds the members that could be computed.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class MissingSFunction(LookupError):
    pass


@dataclass(frozen=True)
class SFunctionSet:
    s1: RatFunc = None
    s2: RatFunc = None
    s3: RatFunc = None
    source: int = 1

    def get(self, k):
        return (self.s1, self.s2, self.s3)[k - 1]

    def members(self):
        return {k: s for k, s in ((1, self.s1), (2, self.s2), (3, self.s3)) if s is not None}

    def is_consistent(self, ode):
        """phi = -(s2 + z s1) and s3 s1 = s2 wherever the members are present."""
        phi = ode.phi
        if self.s1 is not None and self.s2 is not None:
            if not (phi + self.s2 + Z * self.s1).is_zero():
                return False
        if self.s1 is not None and self.s2 is not None and self.s3 is not None:
            if not (self.s3 * self.s1 - self.s2).is_zero():
                return False
        return True


def complete_sfunctions(ode, k, s):
    """All three S-functions from S_k, using phi = -(S2 + z S1) and S3 = S2/S1."""
    s = RatFunc.coerce(s)
    phi = ode.phi
    if k == 1:
        s1 = s
        s2 = -phi - Z * s1
        if s1.is_zero():
            raise DegenerateS("S1 = 0, so S3 = S2/S1 is undefined", SFunctionSet(s1, s2, None, 1))
        return SFunctionSet(s1, s2, s2 / s1, 1)
    if k == 2:
        s2 = s
        s1 = -(phi + s2) / Z
        if s1.is_zero():
            raise DegenerateS("S1 = 0, so S3 = S2/S1 is undefined", SFunctionSet(s1, s2, None, 2))
        return SFunctionSet(s1, s2, s2 / s1, 2)
    if k == 3:
        w = s + Z
        if w.is_zero():
            raise DegenerateS("S3 + z = 0, so S1 is undefined", SFunctionSet(None, None, s, 3))
        s1 = -phi / w
        return SFunctionSet(s1, s * s1, s, 3)
    raise ValueError("k must be 1, 2 or 3")


# (dependent, independent, parameter) for each associated 1ODE
ROLES = {1: ("z", "y", "x"), 2: ("z", "x", "y"), 3: ("y", "x", "z")}


@dataclass(frozen=True)
class Ode1:
    """d(dep)/d(indep) = rhs with ``param`` held constant."""

    rhs: object
    dep: str
    indep: str
    param: object = None

    @property
    def rhs_expr(self):
        return normalize(as_expr(self.rhs)) if isinstance(self.rhs, Expr) else from_ratfunc(self.rhs)

    @property
    def rhs_ratfunc(self):
        if isinstance(self.rhs, RatFunc):
            return self.rhs
        return try_ratfunc(self.rhs)

    def params(self):
        if self.param is None:
            return ()
        return (self.param,) if isinstance(self.param, str) else tuple(self.param)

    def __str__(self):
        return f"d{self.dep}/d{self.indep} = {self.rhs_expr}"


def associated_1ode(sset, k):
    s = sset.get(k)
    if s is None:
        raise MissingSFunction(f"S{k} is not available")
    dep, indep, param = ROLES[k]
    return Ode1(-s, dep, indep, param)


def associated_1odes(ode, sset):
    """The three associated 1ODEs (None where the S-function is missing)."""
    out = []
    for k in (1, 2, 3):
        out.append(associated_1ode(sset, k) if sset.get(k) is not None else None)
    return out
