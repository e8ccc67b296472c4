"""Recursive-descent parser for the expression grammar.

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('+' | '-') unary | power
    power    := atom ('^' exponent)?
    exponent := signed integer | '(' signed rational literal ')'

A bare exponent stops at the integer, so x^2/2 is (x^2)/2.
    atom     := INT | NAME | exp(expr) | ln(expr) | int(expr, NAME, rational, expr) | '(' expr ')'

``int(f, v, a, b)`` is the inert integral of f over v from a to b.
"""

import re

from .expr import Add, Const, Exp, Integral, Ln, Mul, Pow, Var, normalize
from .rat import rat


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
FUNCTIONS = ("exp", "ln", "int")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos and not m.group(0):
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
        if pos >= len(text):
            break
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] not in ("op",):
            raise ParseError(f"expected {value!r}", tok[2])
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else Mul((Const(-1), t)))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        factors = [self.unary()]
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            f = self.unary()
            if tok[1] == "/":
                if type(f) is Const and f.value == 0:
                    raise ParseError("zero denominator literal", tok[2])
                f = Pow(f, -1)
            factors.append(f)
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return inner if tok[1] == "+" else Mul((Const(-1), inner))
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def rational_literal(self, allow_fraction=True):
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        tok = self.take()
        if tok[0] != "int":
            raise ParseError("expected a rational literal", tok[2])
        num = int(tok[1])
        den = 1
        if (allow_fraction and self.peek()[0] == "op" and self.peek()[1] == "/"
                and self.tokens[self.i + 1][0] == "int"):
            slash = self.take()
            den = int(self.take()[1])
            if den == 0:
                raise ParseError("zero denominator literal", slash[2])
        return rat(sign * num, den)

    def exponent(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            k = self.rational_literal()
            self.expect(")")
            return k
        return self.rational_literal(allow_fraction=False)

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            return Const(int(value))
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", pos)
                self.take()
                if value == "exp":
                    arg = self.expr()
                    self.expect(")")
                    return Exp(arg)
                if value == "ln":
                    arg = self.expr()
                    self.expect(")")
                    return Ln(arg)
                integrand = self.expr()
                self.expect(",")
                vt = self.take()
                if vt[0] != "name":
                    raise ParseError("expected integration variable", vt[2])
                self.expect(",")
                lower = self.rational_literal()
                self.expect(",")
                upper = self.expr()
                self.expect(")")
                return Integral(integrand, vt[1], lower, upper)
            if value in FUNCTIONS:
                raise ParseError(f"function {value!r} needs an argument list", pos)
            return Var(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {value!r}", pos)


def parse_raw(text):
    """Parse without normalizing."""
    return _Parser(text).parse()


def parse_expr(text):
    """Parse and normalize."""
    return normalize(parse_raw(text))
