"""Exact symbolic kernel: rationals, polynomials, rational functions, expressions."""

from .expr import (
    Add, Const, DivisionByZero, Exp, Expr, Integral, Ln, Mul, NotRational, Pow, Var,
    as_expr, differentiate, expr_str, free_vars, from_ratfunc, normalize, subs, to_ratfunc,
    try_ratfunc,
)
from .ode import Ode2
from .numeric import DomainError, InertNodeError, PoleAtPoint, eval_numeric
from .parse import ParseError, parse_expr
from .poly import Poly, poly_factor, poly_gcd, var_key
from .rat import Rat, rat
from .ratfunc import RatFunc


def normalize_ratfunc(e):
    """RatFunc for a transcendental-free expression (or parseable string)."""
    if isinstance(e, str):
        e = parse_expr(e)
    return to_ratfunc(e)


def collect_coefficients(p, main_vars):
    """Map monomials in main_vars to their coefficient Polys in the other variables."""
    return p.coeff_map(tuple(main_vars))
