"""Random quadratic coefficient systems with a planted rational solution."""

import random
from itertools import combinations_with_replacement

from sfint.algsolve import CoeffSystem
from sfint.symcore import Poly
from sfint.symcore.rat import rat


def planted_system(seed, max_unknowns=4, dense=False):
    """Sparse systems may have curves of solutions through the plant; dense ones
    (every monomial of degree at most 2 present) are zero-dimensional in general."""
    rng = random.Random(seed)
    k = rng.randint(1, max_unknowns)
    names = tuple(f"a{i}" for i in range(k))
    plant = {u: rat(rng.randint(-4, 4), rng.choice([1, 1, 1, 2, 3])) for u in names}
    vs = [Poly.var(u) for u in names]
    monos = [Poly.const(1)] + vs + [a * b for a, b in combinations_with_replacement(vs, 2)]
    eqs = []
    for _ in range(rng.randint(k + 1, k + 3)):
        if dense:
            terms = monos[1:]
        else:
            terms = rng.sample(monos[1:], rng.randint(1, min(4, len(monos) - 1)))
        p = Poly.const(0)
        for t in terms:
            p = p + t.scale(rat(rng.choice([-3, -2, -1, 1, 2, 3])))
        eqs.append(p - Poly.const(p.evaluate(plant)))
    return CoeffSystem.make(eqs, names), plant


def recovers(branches, plant):
    """True when some branch, with its free unknowns set to the plant, reproduces it."""
    for br in branches:
        vals = {u: plant[u] for u in br.free}
        try:
            got = br.specialize(vals)
        except ZeroDivisionError:
            continue
        if all(got[u] == plant[u] for u in plant):
            return True
    return False
