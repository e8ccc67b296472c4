"""Rational solutions of small polynomial systems in the ansatz unknowns.

The solver works in stages on each branch: linear elimination (equations
linear in one unknown with a constant coefficient), univariate rational
roots, factor splitting, a lex Groebner basis with a work budget, and as a
last resort a case split on a nonconstant linear coefficient.
"""

from dataclasses import dataclass, field

from .symcore.poly import Poly, poly_factor, poly_str, sort_vars
from .symcore.rat import ONE, ZERO, rat
from .symcore.ratfunc import RatFunc

MAX_REDUCTIONS = 5000
MAX_DEGREE = 20


class Inconsistent(Exception):
    pass


class BudgetExceeded(Exception):
    pass


def _normalize_eq(p):
    p = p.trim()
    if p.is_zero():
        return p
    return p.primitive()[1]


@dataclass(frozen=True)
class CoeffSystem:
    unknowns: tuple
    equations: tuple

    @classmethod
    def make(cls, equations, unknowns=None):
        seen = set()
        eqs = []
        names = set()
        for e in equations:
            e = _normalize_eq(e if isinstance(e, Poly) else Poly.const(e))
            if e.is_zero() or e in seen:
                continue
            seen.add(e)
            eqs.append(e)
            names.update(e.variables())
        if unknowns is None:
            unknowns = sort_vars(names)
        else:
            unknowns = tuple(unknowns)
            extra = names - set(unknowns)
            if extra:
                raise ValueError(f"equations use variables outside the unknowns: {sorted(extra)}")
        return cls(unknowns, tuple(eqs))


@dataclass(frozen=True)
class SolutionBranch:
    assignments: tuple  # ((unknown, RatFunc), ...) in unknown order
    free: tuple

    def as_dict(self):
        return dict(self.assignments)

    def value(self, name):
        return self.as_dict().get(name)

    def specialize(self, free_values):
        """Rational values for every unknown once the free ones are fixed."""
        vals = {u: rat(free_values.get(u, 0)) for u in self.free}
        out = dict(vals)
        for u, r in self.assignments:
            out[u] = r.evaluate(vals)
        return out

    def __str__(self):
        parts = [f"{u} = {r}" for u, r in self.assignments]
        if self.free:
            parts.append("free: " + ", ".join(self.free))
        return "{" + ", ".join(parts) + "}"


# ------------------------------------------------------------------ substitution


def _subs_value(p, u, value):
    """Substitute u := value (RatFunc) into Poly p; returns the cleared numerator Poly."""
    if u not in p.gens or p.degree(u) <= 0:
        return p
    if value.is_poly():
        v = value.num.scale(1 / value.den.const_value())
        return p.subs({u: v}).trim()
    k = p.degree(u)
    i = p.gens.index(u)
    # p = sum_j c_j u^j  ->  sum_j c_j num^j den^(k-j)
    coeffs = {}
    for e, c in p.terms.items():
        j = e[i]
        coeffs.setdefault(j, {})[e[:i] + (0,) + e[i + 1:]] = c
    num, den = value.num, value.den
    total = Poly.const(0)
    for j, terms in coeffs.items():
        total = total + Poly(p.gens, terms) * (num ** j) * (den ** (k - j))
    return total.trim()


def _subs_assign(r, u, value):
    if not r.depends_on(u):
        return r
    return r.subs({u: value})


# ------------------------------------------------------------------ stage 1


def _const_linear_vars(eq):
    """Unknowns in which eq is linear with a constant coefficient."""
    gens = eq.gens
    n = len(gens)
    maxdeg = [0] * n
    mixed = [False] * n
    for e in eq.terms:
        nz = [i for i in range(n) if e[i]]
        for i in nz:
            if e[i] > maxdeg[i]:
                maxdeg[i] = e[i]
            if e[i] == 1 and len(nz) > 1:
                mixed[i] = True
    return [gens[i] for i in range(n) if maxdeg[i] == 1 and not mixed[i]]


def _linear_pick(eqs, order):
    """Best (eq index, unknown) for which eq is linear in unknown with constant coefficient."""
    rank = {u: i for i, u in enumerate(order)}
    best = None
    for idx, eq in enumerate(eqs):
        cands = _const_linear_vars(eq)
        if not cands:
            continue
        u = min(cands, key=lambda v: rank.get(v, len(rank)))
        key = (eq.total_degree(), len(eq), idx)
        if best is None or key < best[0]:
            best = (key, idx, u)
    return None if best is None else (best[1], best[2])


def _clean(eqs):
    out = []
    seen = set()
    for e in eqs:
        e = _normalize_eq(e)
        if e.is_zero():
            continue
        if e.is_const():
            raise Inconsistent("nonzero constant equation")
        if e in seen:
            continue
        seen.add(e)
        out.append(e)
    return out


def _gauss(lin, order):
    """Solve fully linear equations; returns {unknown: Poly in the remaining unknowns}."""
    rank = {u: i for i, u in enumerate(order)}
    pivots = {}
    for eq in lin:
        row = {}
        const = ZERO
        for e, c in eq.terms.items():
            if any(e):
                row[eq.gens[e.index(1)]] = c
            else:
                const = c
        for u in [v for v in row if v in pivots]:
            c = row.pop(u)
            prow, pconst = pivots[u]
            for v, k in prow.items():
                nv = row.get(v, ZERO) + c * k
                if nv:
                    row[v] = nv
                else:
                    row.pop(v, None)
            const += c * pconst
        if not row:
            if const:
                raise Inconsistent("inconsistent linear equations")
            continue
        u = min(row, key=lambda v: rank.get(v, len(rank)))
        cu = row.pop(u)
        expr = {v: -k / cu for v, k in row.items()}
        econst = -const / cu
        for w, (prow, pconst) in pivots.items():
            c = prow.pop(u, None)
            if c is None:
                continue
            for v, k in expr.items():
                nv = prow.get(v, ZERO) + c * k
                if nv:
                    prow[v] = nv
                else:
                    prow.pop(v, None)
            pivots[w] = (prow, pconst + c * econst)
        pivots[u] = (expr, econst)
    out = {}
    for u, (row, const) in pivots.items():
        p = Poly.const(const)
        for v, k in row.items():
            p = p + Poly.var(v).scale(k)
        out[u] = p
    return out


def _apply(eqs, assign, sol):
    """Substitute a solved set {u: Poly} into equations and earlier assignments."""
    new_assign = {}
    for k, r in assign.items():
        if any(r.depends_on(u) for u in sol):
            r = r.subs(sol)
        new_assign[k] = r
    for u, p in sol.items():
        new_assign[u] = RatFunc.coerce(p)
    out = []
    for e in eqs:
        vs = e.variables()
        m = {u: p for u, p in sol.items() if u in vs}
        out.append(e.subs(m).trim() if m else e)
    return out, new_assign


def _linear_stage(eqs, assign, order):
    """Gaussian elimination on the fully linear equations, repeated to a fixed point."""
    eqs = _clean(eqs)
    while True:
        lin = [e for e in eqs if e.total_degree() == 1]
        if not lin:
            return eqs, assign
        sol = _gauss(lin, order)
        rest = [e for e in eqs if e.total_degree() != 1]
        eqs, assign = _apply(rest, assign, sol)
        eqs = _clean(eqs)


def _substitute_one(eqs, assign, idx, u):
    eq = eqs[idx]
    c = eq.coeff_of(u, 1).trim().const_value()
    rest = eq - eq.coeff_of(u, 1) * Poly.var(u)
    value = rest.scale(-1 / c).trim()
    others = [e for i, e in enumerate(eqs) if i != idx]
    return _apply(others, assign, {u: value})


def _eliminate(eqs, assign, order):
    """Linear elimination to a fixed point (including nonlinear equations that are
    linear in one unknown with a constant coefficient)."""
    eqs, assign = _linear_stage(eqs, dict(assign), order)
    while True:
        pick = _linear_pick(eqs, order)
        if pick is None:
            return assign, eqs
        eqs, assign = _substitute_one(eqs, assign, *pick)
        eqs, assign = _linear_stage(eqs, assign, order)


def linear_reduce(sys):
    """Solve equations linear in one unknown (constant coefficient) to a fixed point.

    Returns (assignments, reduced system); raises Inconsistent.
    """
    assign, eqs = _eliminate(list(sys.equations), {}, list(sys.unknowns))
    return assign, CoeffSystem(sys.unknowns, tuple(eqs))


# ------------------------------------------------------------------ rational roots


def rational_roots(p):
    """Distinct rational roots of a univariate Poly, ascending."""
    vs = p.variables()
    if len(vs) != 1:
        raise ValueError("univariate polynomial expected")
    _, facs = poly_factor(p)
    roots = []
    u = vs[0]
    for f, _ in facs:
        if f.total_degree() == 1:
            a = f.coeff_of(u, 1).trim().const_value()
            b = f.coeff_of(u, 0).trim()
            b = b.const_value() if not b.is_zero() else ZERO
            roots.append(-b / a)
    return sorted(set(roots))


# ------------------------------------------------------------------ Groebner basis


class _GB:
    """Buchberger's algorithm under lex order on a fixed tuple of generators."""

    def __init__(self, gens):
        self.gens = gens
        self.reductions = 0

    def to_dict(self, p):
        return dict(p.embed(self.gens).terms)

    @staticmethod
    def lead(d):
        return max(d)

    @staticmethod
    def divides(a, b):
        return all(i <= j for i, j in zip(a, b))

    def monic(self, d):
        lm = self.lead(d)
        inv = 1 / d[lm]
        return {e: c * inv for e, c in d.items()}

    def reduce(self, d, basis):
        d = dict(d)
        out = {}
        while d:
            lm = self.lead(d)
            c = d[lm]
            for g in basis:
                glm = g[0]
                if self.divides(glm, lm):
                    shift = tuple(a - b for a, b in zip(lm, glm))
                    for e, v in g[1].items():
                        ne = tuple(a + b for a, b in zip(e, shift))
                        nv = d.get(ne, ZERO) - c * v
                        if nv:
                            d[ne] = nv
                        else:
                            d.pop(ne, None)
                    break
            else:
                out[lm] = c
                del d[lm]
        return out

    def spoly(self, f, g):
        lf, lg = f[0], g[0]
        lcm = tuple(max(a, b) for a, b in zip(lf, lg))
        sf = tuple(a - b for a, b in zip(lcm, lf))
        sg = tuple(a - b for a, b in zip(lcm, lg))
        out = {}
        for e, v in f[1].items():
            ne = tuple(a + b for a, b in zip(e, sf))
            out[ne] = out.get(ne, ZERO) + v
        for e, v in g[1].items():
            ne = tuple(a + b for a, b in zip(e, sg))
            nv = out.get(ne, ZERO) - v
            if nv:
                out[ne] = nv
            else:
                out.pop(ne, None)
        return {e: v for e, v in out.items() if v}

    def basis(self, polys):
        # pairs are processed by sugar degree, which keeps lex computations tame
        basis = []
        sugar = []
        for p in polys:
            d = self.reduce(self.to_dict(p), basis)
            if d:
                d = self.monic(d)
                basis.append((self.lead(d), d))
                sugar.append(max(sum(e) for e in d))
        pairs = {(i, j): self._pair_sugar(basis, sugar, i, j)
                 for j in range(len(basis)) for i in range(j)}
        done = set()
        while pairs:
            i, j = min(pairs, key=lambda ij: (pairs[ij], ij))
            s = pairs.pop((i, j))
            done.add((i, j))
            li, lj = basis[i][0], basis[j][0]
            if all(a == 0 or b == 0 for a, b in zip(li, lj)):
                continue
            lcm = tuple(max(a, b) for a, b in zip(li, lj))
            if self._chain(basis, i, j, lcm, done):
                continue
            self.reductions += 1
            if self.reductions > MAX_REDUCTIONS:
                raise BudgetExceeded("too many S-polynomial reductions")
            h = self.reduce(self.spoly(basis[i], basis[j]), basis)
            if not h:
                continue
            h = self.monic(h)
            if max(sum(e) for e in h) > MAX_DEGREE:
                raise BudgetExceeded("intermediate degree too large")
            lm = self.lead(h)
            if not any(lm):
                return [{tuple([0] * len(self.gens)): ONE}]
            basis.append((lm, h))
            sugar.append(max(s, max(sum(e) for e in h)))
            k = len(basis) - 1
            for i2 in range(k):
                pairs[(i2, k)] = self._pair_sugar(basis, sugar, i2, k)
        return [d for _, d in self._interreduce(basis)]

    @staticmethod
    def _pair_sugar(basis, sugar, i, j):
        li, lj = basis[i][0], basis[j][0]
        lcm = tuple(max(a, b) for a, b in zip(li, lj))
        return max(sugar[i] + sum(lcm) - sum(li), sugar[j] + sum(lcm) - sum(lj))

    def _chain(self, basis, i, j, lcm, done):
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if not self.divides(basis[k][0], lcm):
                continue
            a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
            if a in done and b in done:
                return True
        return False

    def _interreduce(self, basis):
        polys = [d for _, d in basis]
        changed = True
        while changed:
            changed = False
            keep = []
            for idx, d in enumerate(polys):
                lm = self.lead(d)
                if any(self.divides(self.lead(o), lm) and (self.lead(o) != lm or j < idx)
                       for j, o in enumerate(polys) if j != idx):
                    changed = True
                    continue
                keep.append(d)
            polys = keep
        out = []
        for idx, d in enumerate(polys):
            others = [(self.lead(o), o) for j, o in enumerate(polys) if j != idx]
            lm = self.lead(d)
            tail = {e: c for e, c in d.items() if e != lm}
            red = self.reduce(tail, others)
            red[lm] = d[lm]
            red = self.monic(red)
            out.append((lm, red))
        out.sort(key=lambda t: t[0])
        return out

    def to_poly(self, d):
        return Poly(self.gens, dict(d)).trim()


def groebner_lex(polys, gens=None):
    """Reduced lex Groebner basis (first generator highest).  May raise BudgetExceeded."""
    polys = [p for p in polys if not p.is_zero()]
    if gens is None:
        gens = sort_vars(sum((p.variables() for p in polys), ()))
    gens = tuple(gens)
    if not gens:
        return [Poly.const(1)] if polys else []
    gb = _GB(gens)
    out = [gb.to_poly(d) for d in gb.basis(polys)]
    return [p.primitive()[1] for p in out]


def triangularize(sys):
    """Lex Groebner basis of the system; [1] signals inconsistency."""
    return groebner_lex(list(sys.equations), sys.unknowns)


# ------------------------------------------------------------------ branching


@dataclass
class _Search:
    order: list
    results: list = field(default_factory=list)
    budget_hits: int = 0
    max_branches: int = 256
    visited: set = field(default_factory=set)

    def run(self, eqs, assign, nonzero=frozenset()):
        """Explore one branch.  ``nonzero`` holds unknowns already known to be
        nonzero on this branch, so overlapping splits are not revisited."""
        if len(self.results) >= self.max_branches:
            return
        key = (frozenset(poly_str(e) for e in eqs),
               frozenset((u, str(r)) for u, r in assign.items()), nonzero)
        if key in self.visited:
            return
        self.visited.add(key)
        try:
            while True:
                eqs, assign = _linear_stage(eqs, assign, self.order)
                if any(u in assign and assign[u].is_zero() for u in nonzero):
                    return
                if not eqs:
                    if assign not in self.results:
                        self.results.append(assign)
                    return
                if (self._split_univariate(eqs, assign, nonzero)
                        or self._split_monomial(eqs, assign, nonzero)):
                    return
                pick = _linear_pick(eqs, self.order)
                if pick is None:
                    break
                eqs, assign = _substitute_one(eqs, assign, *pick)
        except Inconsistent:
            return
        if self._split_factor(eqs, assign, nonzero):
            return
        gens = tuple(sort_vars(sum((e.variables() for e in eqs), ())))
        try:
            gb = groebner_lex(eqs, gens)
        except BudgetExceeded:
            self.budget_hits += 1
            return
        if len(gb) == 1 and gb[0].is_const():
            return
        if sorted(map(str, gb)) != sorted(map(str, eqs)):
            self.run(gb, assign, nonzero)
            return
        self._split_coefficient(gb, assign, nonzero)

    def _split_univariate(self, eqs, assign, nonzero):
        uni = [e for e in eqs if len(e.variables()) == 1]
        if not uni:
            return False
        eq = min(uni, key=lambda e: (e.total_degree(), poly_str(e)))
        u = eq.variables()[0]
        for r in rational_roots(eq):
            self._branch(eqs, assign, u, RatFunc.const(r), nonzero)
        return True

    def _split_monomial(self, eqs, assign, nonzero):
        best = None
        for idx, eq in enumerate(eqs):
            common = None
            for e in eq.terms:
                common = list(e) if common is None else [min(a, b) for a, b in zip(common, e)]
            if common and any(common):
                key = (len(eq), eq.total_degree(), idx)
                if best is None or key < best[0]:
                    best = (key, idx, common)
        if best is None:
            return False
        _, idx, common = best
        eq = eqs[idx]
        rest = [e for i, e in enumerate(eqs) if i != idx]
        # disjoint cases: the first vanishing factor is u, earlier ones are nonzero
        known = nonzero
        for i, k in enumerate(common):
            if k:
                u = eq.gens[i]
                self._branch(rest, assign, u, RatFunc.const(0), known)
                known = known | {u}
        quotient = Poly(eq.gens, {tuple(a - b for a, b in zip(e, common)): c for e, c in eq.terms.items()})
        self.run(rest + [quotient], assign, known)
        return True

    def _split_factor(self, eqs, assign, nonzero):
        for eq in sorted(eqs, key=lambda e: (e.total_degree(), len(e)))[:40]:
            _, facs = poly_factor(eq)
            if len(facs) > 1 or (facs and facs[0][1] > 1):
                rest = [e for e in eqs if e is not eq]
                for f, _ in facs:
                    self.run(rest + [f], assign, nonzero)
                return True
        return False

    def _split_coefficient(self, gb, assign, nonzero):
        """Positive-dimensional case: split on the coefficient of a linear unknown."""
        for eq in sorted(gb, key=lambda e: (e.total_degree(), len(e))):
            for u in sorted(eq.variables(), key=self.order.index):
                if eq.degree(u) != 1:
                    continue
                c = eq.coeff_of(u, 1).trim()
                rest = (eq - eq.coeff_of(u, 1) * Poly.var(u)).trim()
                value = RatFunc.make(-rest, c)
                others = [e for e in gb if e is not eq]
                new_assign = {k: _subs_assign(r, u, value) for k, r in assign.items()}
                new_assign[u] = value
                self.run([_subs_value(e, u, value) for e in others], new_assign, nonzero)
                self.run(others + [c, rest], assign, nonzero)
                return
        self.budget_hits += 1

    def _branch(self, eqs, assign, u, value, nonzero=frozenset()):
        if u in nonzero and value.is_zero():
            return
        new_assign = {k: _subs_assign(r, u, value) for k, r in assign.items()}
        new_assign[u] = value
        self.run([_subs_value(e, u, value) for e in eqs], new_assign, nonzero)


def _branch_key(branch, unknowns):
    try:
        vals = branch.specialize({})
    except ZeroDivisionError:
        vals = {}
    nonzero = sum(1 for _, r in branch.assignments if not r.is_zero()) + len(branch.free)
    vec = tuple(vals.get(u, ZERO) for u in unknowns)
    return (nonzero, vec, str(branch))


def solve_rational(sys, max_branches=256):
    """All rational solution branches found, sorted by (nonzero count, assignment vector)."""
    if not isinstance(sys, CoeffSystem):
        sys = CoeffSystem.make(sys)
    order = list(sys.unknowns)
    search = _Search(order, max_branches=max_branches)
    search.run(list(sys.equations), {})
    branches = []
    seen = set()
    for assign in search.results:
        free = tuple(u for u in order if u not in assign)
        items = tuple((u, assign[u]) for u in order if u in assign)
        key = tuple((u, str(r)) for u, r in items)
        if key in seen:
            continue
        seen.add(key)
        branches.append(SolutionBranch(items, free))
    branches.sort(key=lambda b: _branch_key(b, order))
    return branches


def check_branch(sys, branch):
    """Exact soundness check: every equation vanishes under the assignments."""
    values = branch.as_dict()
    for eq in sys.equations:
        r = RatFunc.coerce(eq)
        sub = r.subs({u: v for u, v in values.items() if u in eq.variables()})
        if not sub.is_zero():
            return False
    return True


def specializations(branch):
    """Candidate rational points for a branch: free unknowns 0, then single 1s, then all 1."""
    tries = [{}]
    for u in branch.free:
        tries.append({u: 1})
    if len(branch.free) > 1:
        tries.append({u: 1 for u in branch.free})
    out = []
    for t in tries:
        try:
            out.append(branch.specialize(t))
        except ZeroDivisionError:
            continue
    return out
