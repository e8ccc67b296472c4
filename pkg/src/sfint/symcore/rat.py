"""Exact rational numbers.

All coefficients in the symbolic path are ``gmpy2.mpq`` values.  ``mpq``
keeps numerator and denominator coprime with a positive denominator, and
hashes and compares equal to Python ints and Fractions, so it drops in
wherever a number is expected.
"""

from fractions import Fraction

import gmpy2

Rat = type(gmpy2.mpq(0))

ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)


def rat(value, den=None):
    """Coerce ints, strings like '3/4', Fractions and mpq to an exact Rat."""
    if den is not None:
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        return gmpy2.mpq(value, den)
    if isinstance(value, Rat):
        return value
    if isinstance(value, bool):
        return gmpy2.mpq(int(value))
    if isinstance(value, int):
        return gmpy2.mpq(value)
    if isinstance(value, Fraction):
        return gmpy2.mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return gmpy2.mpq(Fraction(value.strip()).numerator, Fraction(value.strip()).denominator)
    if type(value).__name__ in ("mpz",):
        return gmpy2.mpq(value)
    if isinstance(value, float):
        raise TypeError("floats are not allowed as exact coefficients")
    raise TypeError(f"cannot convert {type(value).__name__} to Rat")


def is_integer(q):
    return q.denominator == 1


def rat_str(q):
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
