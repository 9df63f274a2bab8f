"""Parsers for parameter expressions and module-label expressions.

Scalars: rational expressions in integers, fractions and parameter names, e.g.
``a+b``, ``-3/2*lam``, ``(mu-1)^2``.  Labels: ``SC(int)``, ``W(int, expr)``,
``Pi(int, expr)``, ``SPi(int, expr)`` and ``M``, combined with ``*`` and ``+`` (``*``
binds tighter) and parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .scalar import Scalar, param

__all__ = ["ParseError", "parse_scalar", "LabelNode", "BinaryNode", "parse_label_expression", "parse_call", "tokenize"]


class ParseError(ValueError):
    """Malformed input; ``position`` is the 0-based character offset of the problem."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.message = message
        self.text = text
        self.position = position


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op" or "end"
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, self.text, tok.pos)

    def accept(self, value: str) -> bool:
        if self.tok.kind == "op" and self.tok.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            found = self.tok.value or "end of input"
            self.error(f"expected {value!r}, found {found!r}")

    def expect_end(self):
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.value!r}")

    # scalar expressions

    def scalar_expr(self) -> Scalar:
        value = self.scalar_term()
        while True:
            if self.accept("+"):
                value = value + self.scalar_term()
            elif self.accept("-"):
                value = value - self.scalar_term()
            else:
                return value

    def scalar_term(self) -> Scalar:
        value = self.scalar_unary()
        while True:
            if self.accept("*"):
                value = value * self.scalar_unary()
            elif self.tok.kind == "op" and self.tok.value == "/":
                tok = self.tok
                self.i += 1
                d = self.scalar_unary()
                if d.is_zero():
                    self.error("division by zero", tok)
                value = value / d
            else:
                return value

    def scalar_unary(self) -> Scalar:
        if self.accept("-"):
            return -self.scalar_unary()
        if self.accept("+"):
            return self.scalar_unary()
        return self.scalar_power()

    def scalar_power(self) -> Scalar:
        base = self.scalar_atom()
        if self.accept("^"):
            neg = self.accept("-")
            if self.tok.kind != "num":
                self.error("expected an integer exponent")
            k = int(self.tok.value)
            self.i += 1
            base = base ** (-k if neg else k)
        return base

    def scalar_atom(self) -> Scalar:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Scalar(Fraction(int(tok.value)))
        if tok.kind == "name":
            self.i += 1
            return param(tok.value)
        if self.accept("("):
            value = self.scalar_expr()
            self.expect(")")
            return value
        self.error(f"expected a number, a parameter or '(' but found {tok.value or 'end of input'!r}")

    # label expressions

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "num":
            self.error("expected an integer")
        value = int(self.tok.value)
        self.i += 1
        return sign * value

    def label_expr(self):
        node = self.label_term()
        while self.tok.kind == "op" and self.tok.value == "+":
            tok = self.tok
            self.i += 1
            node = BinaryNode("+", node, self.label_term(), tok.pos)
        return node

    def label_term(self):
        node = self.label_atom()
        while self.tok.kind == "op" and self.tok.value == "*":
            tok = self.tok
            self.i += 1
            node = BinaryNode("*", node, self.label_atom(), tok.pos)
        return node

    def label_atom(self):
        tok = self.tok
        if self.accept("("):
            node = self.label_expr()
            self.expect(")")
            return node
        if tok.kind != "name":
            self.error(f"expected a module label but found {tok.value or 'end of input'!r}")
        self.i += 1
        if tok.value == "M":
            return LabelNode("M", 0, None, tok.pos)
        if tok.value == "SC":
            self.expect("(")
            ell = self.integer()
            self.expect(")")
            return LabelNode("SC", ell, None, tok.pos)
        if tok.value in ("W", "Pi", "SPi"):
            self.expect("(")
            k = self.integer()
            self.expect(",")
            lam = self.scalar_expr()
            self.expect(")")
            return LabelNode(tok.value, k, lam, tok.pos)
        self.error(f"unknown module label {tok.value!r}", tok)


@dataclass(frozen=True)
class LabelNode:
    kind: str  # "SC", "W", "Pi", "SPi" or "M"
    index: int
    param: Scalar | None
    pos: int


@dataclass(frozen=True)
class BinaryNode:
    op: str
    left: object
    right: object
    pos: int


def parse_scalar(text: str) -> Scalar:
    p = _Parser(text)
    value = p.scalar_expr()
    p.expect_end()
    return value


def parse_label_expression(text: str):
    p = _Parser(text)
    node = p.label_expr()
    p.expect_end()
    return node


def parse_call(text: str) -> tuple[str, list[Scalar]]:
    """``Name(expr, ...)`` or a bare ``Name``, returning the name and the parsed arguments."""
    p = _Parser(text)
    tok = p.tok
    if tok.kind != "name":
        p.error("expected a name")
    p.i += 1
    args: list[Scalar] = []
    if p.accept("("):
        args.append(p.scalar_expr())
        while p.accept(","):
            args.append(p.scalar_expr())
        p.expect(")")
    p.expect_end()
    return tok.value, args
