"""Pratt parser for the problem-definition expression language.

Binding powers, loosest first: ``+ -`` (left), ``* /`` (left), unary minus,
``^`` (right). Function calls need parentheses: ``sin(t)``. ``**`` is
accepted as a spelling of ``^``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .ast import FUNCTIONS, VARIABLES, Bin, Expr, Func, Num, Var

__all__ = ["parse"]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)

_INFIX_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30
_START = frozenset({"number", "variable", "function", "(", "-", "+"})
_CALLABLE = FUNCTIONS - {"neg"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    byte = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", byte, _START | {"operator"})
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            toks.append(_Tok(kind, "^" if val == "**" else val, byte))
        byte += len(m.group().encode("utf-8"))
        pos = m.end()
    toks.append(_Tok("end", "", byte))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text or self.tok.kind == "end":
            got = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(f"expected {text!r}, got {got}", self.tok.offset, {text})
        return self.advance()

    def expression(self, rbp: int = 0) -> Expr:
        left = self.prefix(self.advance())
        while True:
            t = self.tok
            bp = _INFIX_BP.get(t.text) if t.kind == "op" else None
            if bp is None or bp <= rbp:
                break
            self.advance()
            # right associativity for ^: parse the right side one notch looser
            right = self.expression(bp - 1 if t.text == "^" else bp)
            left = Bin(t.text, left, right)
        return left

    def prefix(self, t: _Tok) -> Expr:
        if t.kind == "num":
            return Num(float(t.text))
        if t.kind == "name":
            if t.text in _CALLABLE:
                self.expect("(")
                if self.tok.text == ")":
                    raise ParseError(f"empty argument to {t.text}", self.tok.offset, _START)
                arg = self.expression()
                self.expect(")")
                return Func(t.text, arg)
            if t.text in VARIABLES:
                if self.tok.text == "(":
                    raise ParseError(f"{t.text!r} is a variable, not a function", self.tok.offset, {"operator"})
                return Var(t.text)
            raise ParseError(f"unknown identifier {t.text!r}", t.offset, _START)
        if t.kind == "op" and t.text == "(":
            if self.tok.text == ")":
                raise ParseError("empty parentheses", self.tok.offset, _START)
            inner = self.expression()
            self.expect(")")
            return inner
        if t.kind == "op" and t.text in "-+":
            operand = self.expression(_UNARY_BP)
            return Func("neg", operand) if t.text == "-" else operand
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset, _START)


def parse(text: str) -> Expr:
    """Parse `text` into an expression tree; raises `ParseError` on bad input."""
    p = _Parser(text)
    ast = p.expression()
    if p.tok.kind != "end":
        raise ParseError(f"unexpected {p.tok.text!r} after expression", p.tok.offset, {"operator", "end of input"})
    return ast
