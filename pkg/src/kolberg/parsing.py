"""Expression parsing and canonical printing.

Grammar (UTF-8 text):
    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' integer)?
    base     := rational | variable | '(' expr ')' | '-' base
    rational := integer ('/' positive-integer)?
    variable in {y, t, s, n, x}

A rational literal and a quotient of integer literals denote the same
value, so the tokenizer only knows integers and '/' is always division.
Exponents are integer literals, optionally negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import (
    QN, QQ, QS, QT, QY, QYT,
    DomainError, FractionField, RatFunc, UniPoly, format_element,
)

VARIABLES = frozenset("ytsnx")


class ParseError(ValueError):
    """Syntax or lowering failure; carries the source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/'
    left: object
    right: object
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    child: object
    pos: int = 0


Expression = object  # any of the node classes above


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None, self.pos
        return self.text[self.pos], self.pos

    def take(self):
        ch, pos = self.peek()
        if ch is not None:
            self.pos += 1
        return ch, pos

    def take_integer(self):
        ch, pos = self.peek()
        sign = 1
        if ch == "-":
            self.pos += 1
            sign = -1
            ch, _ = self.peek()
        if ch is None or not ch.isdigit():
            raise ParseError("expected an integer", pos)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return sign * int(self.text[start:self.pos]), pos


class _Parser:
    def __init__(self, text: str, variables):
        self.toks = _Tokenizer(text)
        self.variables = frozenset(variables)

    def parse(self):
        node = self.expr()
        ch, pos = self.toks.peek()
        if ch is not None:
            raise ParseError(f"unexpected character {ch!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            ch, pos = self.toks.peek()
            if ch in ("+", "-"):
                self.toks.take()
                node = Bin(ch, node, self.term(), pos)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            ch, pos = self.toks.peek()
            if ch in ("*", "/"):
                self.toks.take()
                node = Bin(ch, node, self.factor(), pos)
            else:
                return node

    def factor(self):
        node = self.base()
        ch, pos = self.toks.peek()
        if ch == "^":
            self.toks.take()
            k, _ = self.toks.take_integer()
            node = Pow(node, k, pos)
        return node

    def base(self):
        ch, pos = self.toks.peek()
        if ch is None:
            raise ParseError("unexpected end of input", pos)
        if ch == "-":
            self.toks.take()
            return Neg(self.base(), pos)
        if ch == "(":
            self.toks.take()
            node = self.expr()
            ch2, pos2 = self.toks.peek()
            if ch2 != ")":
                raise ParseError("expected ')'", pos2)
            self.toks.take()
            return node
        if ch.isdigit():
            value, pos = self.toks.take_integer()
            return Num(Fraction(value), pos)
        if ch.isalpha():
            if ch not in VARIABLES:
                raise ParseError(f"unknown variable {ch!r}", pos)
            if ch not in self.variables:
                raise ParseError(f"variable {ch!r} not allowed here", pos)
            self.toks.take()
            nxt, npos = self.toks.peek()
            if nxt is not None and nxt.isalpha():
                raise ParseError("variables are single letters", npos)
            return Var(ch, pos)
        raise ParseError(f"unexpected character {ch!r}", pos)


def parse_expr(text: str, variables=VARIABLES) -> Expression:
    """Parse text into an expression tree, validating variable names."""
    return _Parser(text, variables).parse()


def lower(node: Expression, field, env: dict):
    """Evaluate an expression tree inside a field.

    env maps variable names to field elements.  Division by a zero
    polynomial is a parse-level failure, mirroring '1/0'.
    """
    if isinstance(node, Num):
        return field.coerce(node.value)
    if isinstance(node, Var):
        if node.name not in env:
            raise ParseError(
                f"variable {node.name!r} has no meaning in {field.name}",
                node.pos)
        return env[node.name]
    if isinstance(node, Neg):
        return -lower(node.child, field, env)
    if isinstance(node, Pow):
        base = lower(node.base, field, env)
        try:
            return base ** node.exponent
        except ZeroDivisionError:
            raise ParseError("zero raised to a negative power", node.pos)
    if isinstance(node, Bin):
        a = lower(node.left, field, env)
        b = lower(node.right, field, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        try:
            return a / b
        except ZeroDivisionError:
            raise ParseError("division by the zero polynomial", node.pos)
    raise TypeError(f"not an expression node: {node!r}")


def _env_for(field) -> dict:
    if field is QYT:
        return {"y": QYT.coerce(QY.gen), "t": QYT.gen}
    if isinstance(field, FractionField):
        return {field.var: field.gen}
    return {}


def parse_to(text: str, field) -> RatFunc:
    """Parse and lower into one of the tower fields."""
    return lower(parse_expr(text), field, _env_for(field))


def parse_qyt(text: str) -> RatFunc:
    return parse_to(text, QYT)


def parse_qy(text: str) -> RatFunc:
    return parse_to(text, QY)


def parse_qt(text: str) -> RatFunc:
    return parse_to(text, QT)


def parse_qs(text: str) -> RatFunc:
    return parse_to(text, QS)


def parse_poly(text: str, var: str = "n") -> UniPoly:
    """Parse a polynomial over Q in one variable; reject true quotients."""
    field = FractionField(QQ, var) if var not in ("n", "s", "t", "y") else {
        "n": QN, "s": QS, "t": QT, "y": QY}[var]
    rf = parse_to(text, field)
    if rf.den.degree != 0:
        raise DomainError(f"expected a polynomial in {var}, got {rf}")
    scale = rf.den.coeffs[0]
    return UniPoly(QQ, var, [c / scale for c in rf.num.coeffs])


print_canonical = format_element
