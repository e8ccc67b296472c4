"""Liouvillian expression trees.

Nodes are immutable and hash structurally.  ``normalize`` maps a tree to a
canonical form: a sum of terms ``c * T`` where ``c`` is a normalized RatFunc
and ``T`` is a product of transcendental atoms (at most one exp, plus ln
nodes, inert integrals and non-integer powers).  The only transcendental
rewrites are exp(a)*exp(b) -> exp(a+b) and ln(exp(a)) -> a.

``Integral(f, v, lower, upper)`` stands for the integral of f over the bound
variable v from the rational ``lower`` to the expression ``upper``.  It is
never evaluated symbolically.
"""

from functools import lru_cache

import gmpy2

from .poly import Poly, sort_vars
from .rat import ONE, ZERO, Rat, rat, rat_str
from .ratfunc import RatFunc


class NotRational(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


# ---------------------------------------------------------------- nodes


class Expr:
    __slots__ = ("_h",)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_h", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("Expr nodes are immutable")

    def __add__(self, o):
        return Add((self, as_expr(o)))

    def __radd__(self, o):
        return Add((as_expr(o), self))

    def __sub__(self, o):
        return Add((self, Mul((Const(-1), as_expr(o)))))

    def __rsub__(self, o):
        return Add((as_expr(o), Mul((Const(-1), self))))

    def __mul__(self, o):
        return Mul((self, as_expr(o)))

    def __rmul__(self, o):
        return Mul((as_expr(o), self))

    def __truediv__(self, o):
        return Mul((self, Pow(as_expr(o), -1)))

    def __rtruediv__(self, o):
        return Mul((as_expr(o), Pow(self, -1)))

    def __neg__(self):
        return Mul((Const(-1), self))

    def __pow__(self, k):
        return Pow(self, k)

    def __str__(self):
        return expr_str(self)

    def __repr__(self):
        return f"{type(self).__name__}({expr_str(self)!r})"


def _init(obj, **fields):
    for k, v in fields.items():
        object.__setattr__(obj, k, v)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        _init(self, value=rat(value))

    def _key(self):
        return (self.value,)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        _init(self, name=str(name))

    def _key(self):
        return (self.name,)


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        _init(self, args=tuple(args))

    def _key(self):
        return self.args


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        _init(self, args=tuple(args))

    def _key(self):
        return self.args


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        _init(self, base=base, exp=rat(exp))

    def _key(self):
        return (self.base, self.exp)


class Exp(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        _init(self, arg=as_expr(arg))

    def _key(self):
        return (self.arg,)


class Ln(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        _init(self, arg=as_expr(arg))

    def _key(self):
        return (self.arg,)


class Integral(Expr):
    """Inert definite integral of ``integrand`` in ``var`` from ``lower`` to ``upper``."""

    __slots__ = ("integrand", "var", "lower", "upper")

    def __init__(self, integrand, var, lower=0, upper=None):
        upper = Var(var) if upper is None else as_expr(upper)
        _init(self, integrand=as_expr(integrand), var=str(var), lower=rat(lower), upper=upper)

    def _key(self):
        return (self.integrand, self.var, self.lower, self.upper)


ZERO_E = Const(0)
ONE_E = Const(1)


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, RatFunc):
        return from_ratfunc(x)
    if isinstance(x, Poly):
        return from_ratfunc(RatFunc.coerce(x))
    if isinstance(x, str):
        return Var(x)
    return Const(rat(x))


# ---------------------------------------------------------------- traversal


def free_vars(e):
    return _free_vars(e)


@lru_cache(maxsize=65536)
def _free_vars(e):
    t = type(e)
    if t is Const:
        return frozenset()
    if t is Var:
        return frozenset((e.name,))
    if t is Add or t is Mul:
        out = frozenset()
        for a in e.args:
            out |= _free_vars(a)
        return out
    if t is Pow:
        return _free_vars(e.base)
    if t is Exp or t is Ln:
        return _free_vars(e.arg)
    if t is Integral:
        return (_free_vars(e.integrand) - {e.var}) | _free_vars(e.upper)
    raise TypeError(t)


def has_node(e, kinds):
    t = type(e)
    if t in kinds:
        return True
    if t is Add or t is Mul:
        return any(has_node(a, kinds) for a in e.args)
    if t is Pow:
        return has_node(e.base, kinds)
    if t is Exp or t is Ln:
        return has_node(e.arg, kinds)
    if t is Integral:
        return has_node(e.integrand, kinds) or has_node(e.upper, kinds)
    return False


def is_rational_expr(e):
    """True when e has no exp, ln, integral or non-integer power nodes."""
    return _is_rational_expr(e)


@lru_cache(maxsize=65536)
def _is_rational_expr(e):
    t = type(e)
    if t is Const or t is Var:
        return True
    if t is Add or t is Mul:
        return all(_is_rational_expr(a) for a in e.args)
    if t is Pow:
        return e.exp.denominator == 1 and _is_rational_expr(e.base)
    return False


def subs(e, mapping):
    """Substitute expressions for free variables (raw, not normalized)."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    if not mapping:
        return e
    return _subs(e, mapping)


def _subs(e, m):
    t = type(e)
    if t is Const:
        return e
    if t is Var:
        return m.get(e.name, e)
    if t is Add:
        return Add(tuple(_subs(a, m) for a in e.args))
    if t is Mul:
        return Mul(tuple(_subs(a, m) for a in e.args))
    if t is Pow:
        return Pow(_subs(e.base, m), e.exp)
    if t is Exp:
        return Exp(_subs(e.arg, m))
    if t is Ln:
        return Ln(_subs(e.arg, m))
    if t is Integral:
        inner = {k: v for k, v in m.items() if k != e.var and k in free_vars(e.integrand)}
        var, integrand = e.var, e.integrand
        if inner:
            taken = set().union(*(free_vars(v) for v in inner.values()))
            if var in taken:
                # rename the bound variable to avoid capture
                fresh = var + "_"
                while fresh in taken or fresh in free_vars(integrand):
                    fresh += "_"
                integrand = _subs(integrand, {var: Var(fresh)})
                var = fresh
            integrand = _subs(integrand, inner)
        return Integral(integrand, var, e.lower, _subs(e.upper, m))
    raise TypeError(t)


# ---------------------------------------------------------------- canonical form
#
# A canonical sum is a dict {T: RatFunc} with T = (exp_arg, factors):
#   exp_arg  canonical Expr of the exponent, or None
#   factors  tuple of (atom, exponent) sorted by printed atom; atoms are
#            Ln / Integral nodes or canonical bases of non-integer (or
#            negative, for non-rational bases) powers.

UNIT = (None, ())


def _sort_key(e):
    return expr_str(e)


def _sum_add(a, b):
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for T, c in b.items():
        v = out.get(T)
        if v is None:
            out[T] = c
        else:
            v = v + c
            if v.is_zero():
                del out[T]
            else:
                out[T] = v
    return out


def _sum_scale(a, c):
    if c.is_zero():
        return {}
    return {T: v * c for T, v in a.items()}


def _is_rational_atom(atom):
    return type(atom) not in (Ln, Integral, Exp) and _is_rational_expr(atom)


def _make_term(exp_arg, factors):
    """Return (T, coefficient) with rational integer-power factors folded out."""
    coeff = RatFunc.const(1)
    fs = []
    for atom, k in factors.items():
        if k == 0:
            continue
        if _is_rational_atom(atom):
            whole = k.numerator // k.denominator
            if whole:
                coeff = coeff * (_rational_of(atom) ** int(whole))
                k = k - whole
            if k == 0:
                continue
        fs.append((atom, k))
    fs.sort(key=lambda f: (_sort_key(f[0]), f[1]))
    return (exp_arg, tuple(fs)), coeff


def _rational_of(atom):
    c = _canon(atom)
    if not c:
        return RatFunc.const(0)
    return c[UNIT]


def _term_mul(T1, T2):
    if T1 == UNIT:
        return T2, None
    if T2 == UNIT:
        return T1, None
    e1, f1 = T1
    e2, f2 = T2
    if e1 is None:
        ea = e2
    elif e2 is None:
        ea = e1
    else:
        s = _sum_add(_canon(e1), _canon(e2))
        ea = _to_expr(s) if s else None
    if not f1 or not f2:
        fs = f1 or f2
        return (ea, fs), None
    merged = dict(f1)
    for atom, k in f2:
        merged[atom] = merged.get(atom, ZERO) + k
    T, coeff = _make_term(ea, merged)
    return T, coeff


def _sum_mul(a, b):
    if not a or not b:
        return {}
    if len(a) == 1 and UNIT in a:
        return _sum_scale(b, a[UNIT])
    if len(b) == 1 and UNIT in b:
        return _sum_scale(a, b[UNIT])
    out = {}
    for T1, c1 in a.items():
        for T2, c2 in b.items():
            T, k = _term_mul(T1, T2)
            c = c1 * c2
            if k is not None:
                c = c * k
            if c.is_zero():
                continue
            v = out.get(T)
            if v is None:
                out[T] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[T]
                else:
                    out[T] = v
    return out


def _term_pow(T, k):
    """T**k for a single transcendental monomial and rational k."""
    e, fs = T
    ea = None
    if e is not None:
        s = _sum_scale(_canon(e), RatFunc.const(k))
        ea = _to_expr(s) if s else None
    merged = {atom: m * k for atom, m in fs}
    return _make_term(ea, merged)


def _perfect_root(q, n):
    """Exact n-th root of a positive rational, or None."""
    if q < 0:
        return None
    a, ea = gmpy2.iroot(gmpy2.mpz(q.numerator), n)
    b, eb = gmpy2.iroot(gmpy2.mpz(q.denominator), n)
    if ea and eb:
        return gmpy2.mpq(a, b)
    return None


def _pow_sum(B, k):
    if k.denominator == 1:
        n = int(k)
        if n == 0:
            return {UNIT: RatFunc.const(1)}
        if not B:
            if n < 0:
                raise DivisionByZero("zero raised to a negative power")
            return {}
        if n > 0:
            result = None
            base = B
            while n:
                if n & 1:
                    result = base if result is None else _sum_mul(result, base)
                n >>= 1
                if n:
                    base = _sum_mul(base, base)
            return result
        if len(B) == 1:
            (T, c), = B.items()
            if T == UNIT:
                return {UNIT: c ** n}
            T2, k2 = _term_pow(T, k)
            coeff = c ** n
            if k2 is not None:
                coeff = coeff * k2
            return {T2: coeff}
        return _atom_power(_to_expr(B), k)
    # non-integer exponent
    if not B:
        if k < 0:
            raise DivisionByZero("zero raised to a negative power")
        return {}
    if len(B) == 1:
        (T, c), = B.items()
        if T == UNIT and c.is_const():
            v = c.const_value()
            num = v ** k.numerator if k > 0 else (1 / v) ** (-k.numerator)
            root = _perfect_root(num, k.denominator)
            if root is not None:
                return {UNIT: RatFunc.const(root)}
        if T != UNIT and c == RatFunc.const(1) and T[1] == ():
            T2, k2 = _term_pow(T, k)
            return {T2: k2 if k2 is not None else RatFunc.const(1)}
    return _atom_power(_to_expr(B), k)


def _atom_power(atom, k):
    T, coeff = _make_term(None, {atom: k})
    return {T: coeff}


@lru_cache(maxsize=65536)
def _canon(e):
    t = type(e)
    if t is Const:
        return {UNIT: RatFunc.const(e.value)} if e.value != 0 else {}
    if t is Var:
        return {UNIT: RatFunc.var(e.name)}
    if t is Add:
        out = {}
        for a in e.args:
            out = _sum_add(out, _canon(a))
        return out
    if t is Mul:
        out = {UNIT: RatFunc.const(1)}
        for a in e.args:
            out = _sum_mul(out, _canon(a))
            if not out:
                return {}
        return out
    if t is Pow:
        return _pow_sum(_canon(e.base), e.exp)
    if t is Exp:
        A = _canon(e.arg)
        if not A:
            return {UNIT: RatFunc.const(1)}
        return {(_to_expr(A), ()): RatFunc.const(1)}
    if t is Ln:
        A = _canon(e.arg)
        if not A:
            raise DivisionByZero("logarithm of zero")
        if len(A) == 1:
            (T, c), = A.items()
            if T == UNIT and c == RatFunc.const(1):
                return {}
            if T[0] is not None and T[1] == () and c == RatFunc.const(1):
                return _canon(T[0])
        return _atom_power(Ln(_to_expr(A)), ONE)
    if t is Integral:
        f = _canon(e.integrand)
        if not f:
            return {}
        up = normalize(e.upper)
        if up == Const(e.lower):
            return {}
        node = Integral(_to_expr(f), e.var, e.lower, up)
        return _atom_power(node, ONE)
    raise TypeError(t)


def _poly_terms(p):
    """Canonical Expr terms of a Poly (graded-lex descending)."""
    out = []
    for exp, c in p.sorted_terms():
        parts = []
        if c != 1 or not any(exp):
            parts.append(Const(c))
        for g, k in zip(p.gens, exp):
            if k == 1:
                parts.append(Var(g))
            elif k:
                parts.append(Pow(Var(g), k))
        out.append(parts[0] if len(parts) == 1 else Mul(tuple(parts)))
    return out


def _poly_expr(p):
    ts = _poly_terms(p)
    if not ts:
        return ZERO_E
    return ts[0] if len(ts) == 1 else Add(tuple(ts))


def _coeff_factors(c):
    """Factor list for a RatFunc coefficient inside a product."""
    parts = []
    num, den = c.num, c.den
    if len(num) == 1:
        (exp, k), = num.terms.items()
        if k != 1:
            parts.append(Const(k))
        for g, m in zip(num.gens, exp):
            if m == 1:
                parts.append(Var(g))
            elif m:
                parts.append(Pow(Var(g), m))
    else:
        parts.append(_poly_expr(num))
    if not den.is_const():
        parts.append(Pow(_poly_expr(den), -1))
    return parts


def _to_expr(s):
    if not s:
        return ZERO_E
    items = sorted(s.items(), key=lambda it: _term_sort_key(it[0]))
    terms = []
    for T, c in items:
        if T == UNIT:
            if c.den.is_const():
                terms.extend(_poly_terms(c.num))
            else:
                parts = _coeff_factors(c)
                terms.append(parts[0] if len(parts) == 1 else Mul(tuple(parts)))
            continue
        parts = [] if c == RatFunc.const(1) else _coeff_factors(c)
        ea, fs = T
        if ea is not None:
            parts.append(Exp(ea))
        for atom, k in fs:
            parts.append(atom if k == 1 else Pow(atom, k))
        terms.append(parts[0] if len(parts) == 1 else Mul(tuple(parts)))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def _term_sort_key(T):
    if T == UNIT:
        return (0, "", ())
    ea, fs = T
    return (1, "" if ea is None else expr_str(ea), tuple((_sort_key(a), k) for a, k in fs))


def normalize(e):
    """Canonical structural form (idempotent)."""
    return _normalize(as_expr(e))


@lru_cache(maxsize=65536)
def _normalize(e):
    return _to_expr(_canon(e))


def canonical_terms(e):
    """Canonical sum of ``e`` as a list of (exp_arg, factors, RatFunc coefficient)."""
    return [(T[0], T[1], c) for T, c in _canon(as_expr(e)).items()]


def is_zero(e):
    return not _canon(as_expr(e))


def to_ratfunc(e):
    """RatFunc equal to e; raises NotRational if transcendental parts survive."""
    s = _canon(as_expr(e))
    if not s:
        return RatFunc.const(0)
    if len(s) == 1 and UNIT in s:
        return s[UNIT]
    raise NotRational(f"not a rational function: {expr_str(e)}")


def try_ratfunc(e):
    try:
        return to_ratfunc(e)
    except NotRational:
        return None


def from_ratfunc(r):
    r = RatFunc.coerce(r)
    if r.is_zero():
        return ZERO_E
    return _to_expr({UNIT: r})


def from_canonical_terms(terms):
    """Inverse of canonical_terms (inputs must already be canonical atoms)."""
    s = {}
    for ea, fs, c in terms:
        s = _sum_add(s, {(ea, tuple(fs)): c})
    return _to_expr(s)


# ---------------------------------------------------------------- differentiation


def differentiate(e, var):
    """Exact partial derivative, normalized."""
    return normalize(_diff(as_expr(e), var))


def differentiate_raw(e, var):
    """Partial derivative by the plain rules, without normalization."""
    return _diff(as_expr(e), var)


def _diff(e, v):
    t = type(e)
    if v not in free_vars(e):
        return ZERO_E
    if t is Var:
        return ONE_E
    if t is Add:
        return Add(tuple(_diff(a, v) for a in e.args))
    if t is Mul:
        terms = []
        args = e.args
        for i, a in enumerate(args):
            if v not in free_vars(a):
                continue
            terms.append(Mul(args[:i] + (_diff(a, v),) + args[i + 1:]))
        return Add(tuple(terms))
    if t is Pow:
        return Mul((Const(e.exp), Pow(e.base, e.exp - 1), _diff(e.base, v)))
    if t is Exp:
        return Mul((e, _diff(e.arg, v)))
    if t is Ln:
        return Mul((_diff(e.arg, v), Pow(e.arg, -1)))
    if t is Integral:
        terms = []
        if v in free_vars(e.upper):
            at_upper = _subs(e.integrand, {e.var: e.upper})
            terms.append(Mul((at_upper, _diff(e.upper, v))))
        if v != e.var and v in free_vars(e.integrand):
            terms.append(Integral(_diff(e.integrand, v), e.var, e.lower, e.upper))
        return Add(tuple(terms))
    return ZERO_E


# ---------------------------------------------------------------- printing


def expr_str(e):
    return _str(e)


@lru_cache(maxsize=65536)
def _str(e):
    t = type(e)
    if t is Const:
        return rat_str(e.value)
    if t is Var:
        return e.name
    if t is Add:
        if not e.args:
            return "0"
        out = []
        for i, a in enumerate(e.args):
            s = _str(a)
            if i == 0:
                out.append(s)
            elif s.startswith("-"):
                out.append(" - " + s[1:])
            else:
                out.append(" + " + s)
        return "".join(out)
    if t is Mul:
        return _mul_str(e.args)
    if t is Pow:
        return _pow_str(e.base, e.exp)
    if t is Exp:
        return f"exp({_str(e.arg)})"
    if t is Ln:
        return f"ln({_str(e.arg)})"
    if t is Integral:
        return f"int({_str(e.integrand)}, {e.var}, {rat_str(e.lower)}, {_str(e.upper)})"
    raise TypeError(t)


def _factor_str(a, in_den=False):
    s = _str(a)
    t = type(a)
    if t is Add and len(a.args) > 1:
        return f"({s})"
    if t is Const and (a.value < 0 or (in_den and a.value.denominator != 1)):
        return f"({s})"
    if t is Mul and (in_den or s.startswith("-")):
        return f"({s})"
    return s


def _exp_str(k):
    if k.denominator == 1 and k >= 0:
        return str(k.numerator)
    return f"({rat_str(k)})"


def _pow_str(base, k):
    if k < 0:
        return _mul_str((Pow(base, k),))
    b = _str(base)
    tb = type(base)
    simple = tb in (Var, Exp, Ln, Integral) or (tb is Const and base.value >= 0 and base.value.denominator == 1)
    if not simple:
        b = f"({b})"
    return f"{b}^{_exp_str(k)}"


def _mul_str(args):
    if not args:
        return "1"
    sign = ""
    num = []
    den = []
    coeff = ONE
    for a in args:
        if type(a) is Const:
            coeff *= a.value
        elif type(a) is Pow and a.exp < 0:
            den.append(a.base if a.exp == -1 else Pow(a.base, -a.exp))
        else:
            num.append(a)
    if coeff < 0:
        sign = "-"
        coeff = -coeff
    if den and coeff.denominator != 1:
        den.insert(0, Const(coeff.denominator))
        coeff = gmpy2.mpq(coeff.numerator)
    parts = []
    if coeff != 1 or not num:
        parts.append(rat_str(coeff))
    parts.extend(_factor_str(a) for a in num)
    s = sign + "*".join(parts)
    if den:
        d = "*".join(_factor_str(a, True) for a in den)
        if len(den) > 1:
            d = f"({d})"
        s = f"{s}/{d}"
    return s


# ---------------------------------------------------------------- conveniences


def x_y_z():
    return Var("x"), Var("y"), Var("z")


def expr_equal(a, b):
    """Structural equality after normalization."""
    return normalize(a) == normalize(b)


def exp_of(e):
    return Exp(as_expr(e))


def ln_of(e):
    return Ln(as_expr(e))


def const_value(e):
    e = normalize(e)
    if type(e) is Const:
        return e.value
    return None


def variables_sorted(e):
    return sort_vars(free_vars(e))
