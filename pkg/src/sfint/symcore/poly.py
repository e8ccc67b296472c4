"""Sparse multivariate polynomials with exact rational coefficients.

A Poly stores a tuple of generator names and a dict mapping exponent tuples
to nonzero coefficients.  Generators are kept sorted by ``var_key`` so the
canonical monomial order is graded lex with x > y > z > everything else.
gcd, exact division and factorization go through sympy's sparse rings.
"""

import operator
import re
from functools import lru_cache

import gmpy2
from sympy.polys.domains import QQ
from sympy.polys.rings import ring as _sympy_ring

from .rat import ONE, ZERO, Rat, rat, rat_str

_INDEXED = re.compile(r"([A-Za-z_]+?)(\d+)")


def var_key(name):
    """Sort key for variable names: x, y, z first, then natural order."""
    if name in ("x", "y", "z"):
        return (0, "xyz".index(name), "", 0)
    m = _INDEXED.fullmatch(name)
    if m:
        return (1, 0, m.group(1), int(m.group(2)))
    return (1, 0, name, -1)


def sort_vars(names):
    return tuple(sorted(set(names), key=var_key))


def _add_exp(a, b):
    return tuple(map(operator.add, a, b))


class Poly:
    """Immutable sparse polynomial.  Do not mutate ``terms``."""

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens=(), terms=None):
        self.gens = gens
        self.terms = {} if terms is None else terms
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def const(cls, c):
        c = rat(c)
        if c == 0:
            return cls((), {})
        return cls((), {(): c})

    @classmethod
    def var(cls, name):
        return cls((name,), {(1,): ONE})

    @classmethod
    def from_dict(cls, gens, data):
        """Build from {exponent tuple: coefficient} with arbitrary gen order."""
        gens = tuple(gens)
        order = sort_vars(gens)
        if len(order) != len(gens):
            raise ValueError("duplicate generators")
        perm = [gens.index(g) for g in order]
        terms = {}
        for e, c in data.items():
            c = rat(c)
            if c == 0:
                continue
            if len(e) != len(gens):
                raise ValueError("exponent length mismatch")
            key = tuple(e[i] for i in perm)
            v = terms.get(key, ZERO) + c
            if v == 0:
                terms.pop(key, None)
            else:
                terms[key] = v
        return cls(order, terms)

    # basic queries -------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(not any(e) for e in self.terms)

    def const_value(self):
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        for c in self.terms.values():
            return c
        return ZERO

    def variables(self):
        """Generators that actually occur."""
        used = [False] * len(self.gens)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(g for g, u in zip(self.gens, used) if u)

    def trim(self):
        used = self.variables()
        if len(used) == len(self.gens):
            return self
        idx = [self.gens.index(g) for g in used]
        return Poly(used, {tuple(e[i] for i in idx): c for e, c in self.terms.items()})

    def embed(self, gens):
        """Re-express over a superset of generators (gens must be sorted)."""
        if gens == self.gens:
            return self
        pos = [gens.index(g) for g in self.gens]
        n = len(gens)
        terms = {}
        for e, c in self.terms.items():
            new = [0] * n
            for p, k in zip(pos, e):
                new[p] = k
            terms[tuple(new)] = c
        return Poly(gens, terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, v):
        if v not in self.gens:
            return 0 if self.terms else -1
        i = self.gens.index(v)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def degree_in(self, names):
        idx = [i for i, g in enumerate(self.gens) if g in names]
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def lead_monomial(self):
        """Leading exponent under graded lex."""
        return max(self.terms, key=lambda e: (sum(e), e))

    def lead_coeff(self):
        if not self.terms:
            return ZERO
        return self.terms[self.lead_monomial()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    # arithmetic ------------------------------------------------------------

    def _unify(self, other):
        if self.gens == other.gens:
            return self.terms, other.terms, self.gens
        gens = sort_vars(self.gens + other.gens)
        return self.embed(gens).terms, other.embed(gens).terms, gens

    @staticmethod
    def _coerce(x):
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        a, b, gens = self._unify(other)
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(gens, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def scale(self, c):
        c = rat(c)
        if c == 0:
            return Poly(self.gens, {})
        if c == 1:
            return self
        return Poly(self.gens, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly(self.gens, {})
        a, b, gens = self._unify(other)
        if len(b) > len(a):
            a, b = b, a
        out = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = _add_exp(ea, eb)
                v = get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return Poly(gens, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, exp, c=ONE):
        """Multiply by c * gens**exp (exp given over self.gens)."""
        return Poly(self.gens, {_add_exp(e, exp): v * c for e, v in self.terms.items()})

    # comparison --------------------------------------------------------------

    def _canon(self):
        t = self.trim()
        return t.gens, t.terms

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        if self.gens == other.gens:
            return self.terms == other.terms
        return self._canon() == other._canon()

    def __hash__(self):
        if self._hash is None:
            g, t = self._canon()
            self._hash = hash((g, frozenset(t.items())))
        return self._hash

    # calculus and substitution ----------------------------------------------

    def diff(self, v):
        if v not in self.gens:
            return Poly(self.gens, {})
        i = self.gens.index(v)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly(self.gens, out)

    def subs(self, mapping):
        """Substitute Polys (or numbers) for generators."""
        mapping = {k: self._coerce(v) for k, v in mapping.items() if k in self.gens}
        if not mapping:
            return self
        keep = [i for i, g in enumerate(self.gens) if g not in mapping]
        repl = [(i, mapping[g]) for i, g in enumerate(self.gens) if g in mapping]
        keep_gens = tuple(self.gens[i] for i in keep)
        pow_cache = {}

        def power(j, k):
            key = (j, k)
            if key not in pow_cache:
                pow_cache[key] = repl[j][1] ** k
            return pow_cache[key]

        # group terms by the exponents of the substituted generators
        groups = {}
        for e, c in self.terms.items():
            sub_e = tuple(e[i] for i, _ in repl)
            rest = tuple(e[i] for i in keep)
            groups.setdefault(sub_e, {})[rest] = c
        result = Poly((), {})
        for sub_e, rest_terms in groups.items():
            factor = Poly.const(1)
            for j, k in enumerate(sub_e):
                if k:
                    factor = factor * power(j, k)
            result = result + Poly(keep_gens, rest_terms) * factor
        return result

    def evaluate(self, point):
        """Exact value at a point assigning every occurring generator."""
        vals = []
        for g in self.gens:
            if g in point:
                vals.append(rat(point[g]))
            else:
                vals.append(None)
        total = ZERO
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    if v is None:
                        raise KeyError("point does not assign all variables")
                    t = t * v ** k
            total += t
        return total

    def coeff_map(self, main_vars):
        """Collect by monomials in main_vars: {exponent tuple: Poly in the rest}."""
        main = [i for i, g in enumerate(self.gens) if g in main_vars]
        rest = [i for i, g in enumerate(self.gens) if g not in main_vars]
        main_names = tuple(v for v in main_vars)
        pos = {g: j for j, g in enumerate(main_names)}
        rest_gens = tuple(self.gens[i] for i in rest)
        groups = {}
        for e, c in self.terms.items():
            mono = [0] * len(main_names)
            for i in main:
                mono[pos[self.gens[i]]] = e[i]
            groups.setdefault(tuple(mono), {})[tuple(e[i] for i in rest)] = c
        return {m: Poly(rest_gens, t) for m, t in groups.items()}

    def coeff_of(self, v, k):
        """Coefficient of v**k as a Poly (over the same generators)."""
        if v not in self.gens:
            return self if k == 0 else Poly(self.gens, {})
        i = self.gens.index(v)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return Poly(self.gens, out)

    # normalization -------------------------------------------------------------

    def content(self):
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return ONE
        g = gmpy2.mpz(0)
        lcm = gmpy2.mpz(1)
        for c in self.terms.values():
            g = gmpy2.gcd(g, c.numerator)
            lcm = gmpy2.lcm(lcm, c.denominator)
        return gmpy2.mpq(g, lcm)

    def primitive(self):
        """(c, p) with self = c*p, p integral primitive with positive leading coeff."""
        if not self.terms:
            return ZERO, self
        c = self.content()
        if self.lead_coeff() < 0:
            c = -c
        if c == 1:
            return c, self
        inv = 1 / c
        return c, Poly(self.gens, {e: v * inv for e, v in self.terms.items()})

    def monic(self):
        lc = self.lead_coeff()
        return self.scale(1 / lc)

    # sympy bridge ------------------------------------------------------------

    def to_ring(self, gens):
        R = _ring(gens)[0]
        return R.from_dict(dict(self.embed(gens).terms))

    @staticmethod
    def from_ring(gens, elem):
        return Poly(gens, {tuple(e): rat(c) for e, c in elem.items() if c})

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"Poly({poly_str(self)!r})"


@lru_cache(maxsize=256)
def _ring(gens):
    if not gens:
        gens = ("_c",)
    return _sympy_ring(",".join(gens), QQ)


def _common(*polys):
    gens = sort_vars(sum((p.gens for p in polys), ()))
    if not gens:
        gens = ("_c",)
    return gens


def _lift(p, gens):
    if p.gens == gens:
        return p
    if not p.gens and gens == ("_c",):
        return Poly(gens, {(0,): c for c in p.terms.values()})
    return p.embed(gens)


def _drop(p):
    if p.gens == ("_c",):
        return Poly((), {(): c for c in p.terms.values()})
    return p


def poly_gcd(a, b):
    """Greatest common divisor, normalized to primitive with positive LC."""
    if a.is_zero():
        return b.primitive()[1]
    if b.is_zero():
        return a.primitive()[1]
    if a.is_const() or b.is_const():
        return Poly.const(1)
    gens = _common(a, b)
    R = _ring(gens)[0]
    g = R.from_dict(dict(_lift(a, gens).terms)).gcd(R.from_dict(dict(_lift(b, gens).terms)))
    return _drop(Poly.from_ring(gens, g)).trim().primitive()[1]


def poly_exquo(a, b):
    """Exact quotient a/b; raises ValueError when b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if b.is_const():
        return a.scale(1 / b.const_value())
    gens = _common(a, b)
    R = _ring(gens)[0]
    A = R.from_dict(dict(_lift(a, gens).terms))
    B = R.from_dict(dict(_lift(b, gens).terms))
    q, r = A.div(B)
    if r:
        raise ValueError("inexact polynomial division")
    return _drop(Poly.from_ring(gens, q)).trim()


def poly_divides(b, a):
    try:
        poly_exquo(a, b)
        return True
    except ValueError:
        return False


def poly_factor(p):
    """(constant, [(irreducible primitive factor, multiplicity), ...]) sorted canonically."""
    if p.is_zero():
        return ZERO, []
    if p.is_const():
        return p.const_value(), []
    gens = _common(p)
    R = _ring(gens)[0]
    c, facs = R.from_dict(dict(_lift(p, gens).terms)).factor_list()
    out = []
    const = rat(c)
    for f, m in facs:
        fp = _drop(Poly.from_ring(gens, f)).trim()
        k, prim = fp.primitive()
        const *= k ** m
        out.append((prim, m))
    out.sort(key=lambda fm: (fm[0].total_degree(), poly_str(fm[0]), fm[1]))
    return const, out


def poly_sqf_part(p):
    c, facs = poly_factor(p)
    result = Poly.const(1)
    for f, _ in facs:
        result = result * f
    return result


# printing ---------------------------------------------------------------------


def _mono_str(gens, e):
    parts = []
    for g, k in zip(gens, e):
        if k == 1:
            parts.append(g)
        elif k:
            parts.append(f"{g}^{k}")
    return "*".join(parts)


def poly_str(p):
    if not p.terms:
        return "0"
    out = []
    for e, c in p.sorted_terms():
        mono = _mono_str(p.gens, e)
        a = abs(c)
        if not mono:
            body = rat_str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{rat_str(a)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def poly_from_int_dict(gens, data):
    return Poly.from_dict(gens, {e: gmpy2.mpq(c) for e, c in data.items()})


def variables(*names):
    return [Poly.var(n) for n in names]


def is_rat(x):
    return isinstance(x, Rat)
