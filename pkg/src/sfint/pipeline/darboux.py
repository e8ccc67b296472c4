"""Darboux polynomials and Prelle-Singer integrating factors for planar fields.

The vector field is X = N d/dt + M d/dy for dy/dt = M/N.  Parameters are
carried as extra polynomial variables that X does not differentiate.
"""

from itertools import combinations, combinations_with_replacement
from math import lcm
from random import Random

from gmpy2 import mpq

from ..algsolve import CoeffSystem, solve_rational, specializations
from ..symcore.expr import Const, Exp, Mul, Pow, free_vars, from_ratfunc, normalize
from ..symcore.poly import Poly, poly_exquo, poly_factor
from ..symcore.ratfunc import RatFunc

MAX_FACTORS = 8
MAX_BRANCHES = 256
NORMALIZATION_SEED = 20240


def apply_field(m, n, p, t, y):
    return n * p.diff(t) + m * p.diff(y)


def _monomials(variables, degree):
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(variables, d):
            mono = Poly.const(1)
            for v in combo:
                mono = mono * Poly.var(v)
            out.append(mono)
    return out


def _shape(active, params, active_deg, param_deg):
    """Monomials of degree <= active_deg in the active variables times
    monomials of degree <= param_deg in the parameters."""
    pm = _monomials(params, param_deg) if params else [Poly.const(1)]
    return [a * b for a in _monomials(active, max(active_deg, 0)) for b in pm]


def _generic(monos, prefix):
    names = [f"{prefix}{i}" for i in range(len(monos))]
    poly = Poly.const(0)
    for mono, u in zip(monos, names):
        poly = poly + mono * Poly.var(u)
    return poly, names


def partial_degree(p, variables):
    """Total degree of p in the given subset of its variables."""
    idx = [p.gens.index(v) for v in variables if v in p.gens]
    return max((sum(e[i] for i in idx) for e in p.terms), default=0)


def _cofactor(m, n, p, t, y):
    try:
        return poly_exquo(apply_field(m, n, p, t, y), p)
    except ValueError:
        return None


def _cofactor_shape(m, n, t, y, params, da, dp):
    """Cofactor monomials; X raises the t-degree by at most max(deg_t n - 1, deg_t m)
    and the y-degree by at most max(deg_y n, deg_y m - 1)."""
    bt = max(n.degree(t) - 1, m.degree(t))
    by = max(n.degree(y), m.degree(y) - 1)
    return [mono for mono in _shape((t, y), params, da - 1, dp)
            if mono.degree(t) <= bt and mono.degree(y) <= by]


def _is_active(p, t, y):
    vs = p.variables()
    return t in vs or y in vs


def _add_factors(poly, m, n, t, y, found):
    _, facs = poly_factor(poly)
    for f, _ in facs:
        if not _is_active(f, t, y) or any(f == g for g, _ in found):
            continue
        q = _cofactor(m, n, f, t, y)
        if q is not None:
            found.append((f, q))


def _weights(count):
    """Fixed pseudo-random weights for the normalization of the ansatz."""
    rng = Random(NORMALIZATION_SEED)
    return [rng.randint(1, 10007) for _ in range(count)]


def _key(mono, t, y):
    return mono.degree(t), mono.degree(y)


def _solve_ansatz(m, n, t, y, variables, p, pu, q_monos):
    """Solution branches of X[p] = q p for the generic p, normalized so p != 0."""
    q, qu = _generic(q_monos, "e")
    eq = apply_field(m, n, p, t, y) - q * p
    norm = Poly.const(-1)
    for u, w in zip(pu, _weights(len(pu))):
        norm = norm + Poly.var(u).scale(w)
    system = CoeffSystem.make(list(eq.coeff_map(variables).values()) + [norm], pu + qu)
    return solve_rational(system, max_branches=MAX_BRANCHES)


def _sampled_support(m, n, t, y, params, d):
    """(t, y)-exponents that can occur in Darboux polynomials of degree <= d
    and in their cofactors, read off the field at a sample parameter point.

    A parametric Darboux polynomial stays one after specialization, so its
    monomials in (t, y) show up among the branches of the sampled system.
    """
    rng = Random(NORMALIZATION_SEED)
    point = {v: rng.randint(2, 97) for v in params}
    ms, ns = m.subs(point).trim(), n.subs(point).trim()
    if ns.is_zero():
        return None, None
    active = (t, y)
    da = max(partial_degree(ms, active), partial_degree(ns, active))
    p_monos = _shape(active, (), d, 0)
    q_monos = _cofactor_shape(ms, ns, t, y, (), da, 0)
    p, pu = _generic(p_monos, "c")
    qu = [f"e{i}" for i in range(len(q_monos))]
    p_keys, q_keys = set(), set()
    for br in _solve_ansatz(ms, ns, t, y, active, p, pu, q_monos):
        values = br.as_dict()
        live = {u for u in pu + qu if u in br.free or not values[u].is_zero()}
        p_keys.update(_key(mono, t, y) for mono, u in zip(p_monos, pu) if u in live)
        q_keys.update(_key(mono, t, y) for mono, u in zip(q_monos, qu) if u in live)
    return p_keys, q_keys


def darboux_stages(m, n, t, y, params=(), d_max=3, param_deg=None):
    """Yield the growing list of irreducible Darboux polynomials (with cofactors).

    The first list holds the factors of n and m; each later one adds the
    factors found at the next degree in (t, y).  Coefficients are polynomials
    in the parameters of degree <= param_deg (by default the parameter degree
    of the field, at least 1).
    """
    params = tuple(params)
    active = (t, y)
    variables = active + params
    da = max(partial_degree(m, active), partial_degree(n, active))
    dp = max(partial_degree(m, params), partial_degree(n, params)) if params else 0
    if param_deg is None:
        param_deg = max(dp, 1)
    found = []
    _add_factors(n, m, n, t, y, found)
    _add_factors(m, m, n, t, y, found)
    yield list(found)
    for d in range(1, d_max + 1):
        if len(found) >= MAX_FACTORS:
            return
        p_monos = _shape(active, params, d, param_deg)
        q_monos = _cofactor_shape(m, n, t, y, params, da, dp)
        if params:
            p_keys, q_keys = _sampled_support(m, n, t, y, params, d)
            if p_keys is not None:
                if not p_keys:
                    continue
                p_monos = [mono for mono in p_monos if _key(mono, t, y) in p_keys]
                q_monos = [mono for mono in q_monos if _key(mono, t, y) in q_keys]
        before = len(found)
        p, pu = _generic(p_monos, "c")
        for br in _solve_ansatz(m, n, t, y, variables, p, pu, q_monos):
            for values in specializations(br):
                cand = p.subs({u: values.get(u, 0) for u in pu}).trim()
                if cand.is_zero() or not _is_active(cand, t, y):
                    continue
                _add_factors(cand, m, n, t, y, found)
        if len(found) > before:
            yield list(found[:MAX_FACTORS])


def darboux_polynomials(m, n, t, y, params=(), d_max=3, param_deg=None):
    """Irreducible Darboux polynomials (with cofactors) of degree <= d_max in (t, y)."""
    out = []
    for out in darboux_stages(m, n, t, y, params, d_max, param_deg):
        pass
    return out


class _PrelleSinger:
    """Linear system for exponents n_i, a polynomial exponent g and
    exponential factors exp(g_i/f_i) built on a fixed list of Darboux factors."""

    def __init__(self, m, n, t, y, params, factors):
        self.t, self.y, self.factors = t, y, factors
        active = (t, y)
        variables = active + params
        da = max(partial_degree(m, active), partial_degree(n, active))
        dp = max(partial_degree(m, params), partial_degree(n, params)) if params else 0
        self.n_names = [f"n{i}" for i in range(len(factors))]
        unknowns = list(self.n_names)
        g_monos = [mono for mono in _shape(active, params, 1, dp) if _is_active(mono, t, y)]
        g, gu = _generic(g_monos, "g")
        unknowns.extend(gu)
        main = apply_field(m, n, g, t, y)
        side = []
        self.exp_parts = [(g, gu, None)]
        self.owner = {u: None for u in gu}
        for i, (f, q) in enumerate(factors):
            main = main + Poly.var(self.n_names[i]) * q
            fa, fp = partial_degree(f, active), partial_degree(f, params)
            gi, giu = _generic(_shape(active, params, fa - 1, fp), f"u{i}_")
            li, liu = _generic(_shape(active, params, da - 1, dp), f"l{i}_")
            unknowns.extend(giu + liu)
            side.append(apply_field(m, n, gi, t, y) - gi * q - li * f)
            main = main + li
            self.exp_parts.append((gi, giu, f))
            self.owner[self.n_names[i]] = i
            self.owner.update({u: i for u in giu + liu})
        self.unknowns = unknowns
        div = n.diff(t) + m.diff(y)
        self.rows, self.rhs = [], []
        zero = {v: 0 for v in unknowns}
        for e, const in [(main, div)] + [(e, Poly.const(0)) for e in side]:
            cm = e.coeff_map(variables)
            dm = const.coeff_map(variables)
            for key in sorted(set(cm) | set(dm)):
                c = cm.get(key, Poly.const(0))
                self.rows.append([c.coeff_of(u, 1).subs(zero).const_value() for u in unknowns])
                self.rhs.append(-dm.get(key, Poly.const(0)).const_value())

    def assemble(self, val):
        parts = []
        for i, (f, _) in enumerate(self.factors):
            k = val.get(self.n_names[i], 0)
            if k != 0:
                parts.append(Pow(from_ratfunc(RatFunc(f)), k))
        arg = RatFunc.const(0)
        for gi, giu, f in self.exp_parts:
            num = gi.subs({u: val.get(u, 0) for u in giu}).trim()
            if not num.is_zero():
                arg = arg + (RatFunc.make(num) if f is None else RatFunc.make(num, f))
        if not arg.is_zero():
            parts.append(Exp(from_ratfunc(arg)))
        if not parts:
            return Const(1)
        return normalize(Mul(tuple(parts)))

    def first_integral(self):
        """(product of factors annihilated by X, whether all exponents are +-1).

        Pure Darboux products are tried before ones with exponential factors,
        and products with exponents +-1 are preferred over the rest.
        """
        fallback = None
        order = sorted(range(len(self.factors)), key=lambda i: self.factors[i][0].total_degree())
        plain = set(self.n_names)
        top = min(3, len(self.factors))
        plans = [(False, s) for s in range(1, top + 1)] + [(True, s) for s in range(top + 1)]
        for with_exp, size in plans:
            for subset in combinations(order, size):
                keep = [j for j, u in enumerate(self.unknowns)
                        if (with_exp or u in plain)
                        and (self.owner[u] is None or self.owner[u] in subset)]
                sub = [[r[j] for j in keep] for r in self.rows]
                for vec in _nullspace_q(sub, len(keep)):
                    val = {self.unknowns[j]: v for j, v in zip(keep, vec)}
                    val = _integer_exponents(val, self.n_names)
                    cand = self.assemble(val)
                    if not free_vars(cand) & {self.t, self.y}:
                        continue
                    if all(abs(val.get(u, 0)) <= 1 for u in self.n_names):
                        return cand, True
                    fallback = fallback or (cand, False)
        return fallback

    def integrating_factor(self):
        sol = _solve_q(self.rows, self.rhs, len(self.unknowns))
        if sol is None:
            return None
        return self.assemble(dict(zip(self.unknowns, sol)))


def prelle_singer(m, n, t, y, params=(), d_max=3, param_deg=None):
    """Darboux-type first integral or integrating factor for dy/dt = m/n.

    Returns ("integral", I) when a product of Darboux and exponential factors
    is itself constant along X, ("factor", R) when it satisfies
    X[R] = -div(X) R, and None otherwise.  The integral is looked for each
    time new Darboux polynomials turn up, so low-degree answers come fast.
    """
    m, n = m.trim(), n.trim()
    if n.is_zero():
        return None
    params = tuple(params)
    system = fallback = None
    for factors in darboux_stages(m, n, t, y, params, d_max, param_deg):
        system = _PrelleSinger(m, n, t, y, params, factors)
        found = system.first_integral()
        if found is not None:
            if found[1]:
                return "integral", found[0]
            fallback = fallback or found[0]
    if fallback is not None:
        return "integral", fallback
    if system is None:
        return None
    r = system.integrating_factor()
    return None if r is None else ("factor", r)


def _integer_exponents(val, n_names):
    """Scale a null vector so the Darboux exponents are coprime integers."""
    den = 1
    for u in n_names:
        c = val.get(u, 0)
        if c != 0:
            den = lcm(den, int(c.denominator))
    return {u: v * den for u, v in val.items()}


def _rref_q(m, ncols):
    pivots = []
    row = 0
    for col in range(ncols):
        if row == len(m):
            break
        piv = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    return m, pivots


def _nullspace_q(rows, ncols):
    m, pivots = _rref_q([[mpq(x) for x in r] for r in rows], ncols)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for i, col in enumerate(pivots):
            v[col] = -m[i][f]
        basis.append(v)
    return basis


def _solve_q(rows, rhs, ncols):
    m, pivots = _rref_q([[mpq(x) for x in r] + [mpq(b)] for r, b in zip(rows, rhs)], ncols)
    if any(m[i][ncols] != 0 for i in range(len(pivots), len(m))):
        return None
    sol = [mpq(0)] * ncols
    for i, col in enumerate(pivots):
        sol[col] = m[i][ncols]
    return sol
