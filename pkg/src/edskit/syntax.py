"""Tokenizer and recursive-descent expression parser shared by the
expression engine and the input language.

Grammar of the expression layer::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

``^`` is exponentiation between scalars and the wedge product as soon as one
side is a differential form; the evaluator decides from the operand types.
Identifiers may carry trailing primes (``H''``) to name formal derivatives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .errors import ParseError, UnknownIdentifier

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<op>[-+*/^(){}\[\],;:=@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'number', 'ident', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str, source: str | None = None) -> list[Token]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token], source: str | None = None):
        self.tokens = tokens
        self.i = 0
        self.source = source

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "ident") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            shown = tok.text or "end of input"
            raise self.error(f"expected '{text}' but found '{shown}'", tok)
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected an identifier but found '{tok.text or 'end of input'}'", tok)
        return self.next()

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col, self.source)


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction
    tok: Token


@dataclass(frozen=True)
class Name:
    name: str
    tok: Token


@dataclass(frozen=True)
class Call:
    func: str
    arg: Any
    tok: Token


@dataclass(frozen=True)
class Neg:
    arg: Any
    tok: Token


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    tok: Token


def parse_expression(ts: TokenStream):
    node = _term(ts)
    while ts.peek().kind == "op" and ts.peek().text in "+-":
        tok = ts.next()
        node = BinOp(tok.text, node, _term(ts), tok)
    return node


def _term(ts):
    node = _unary(ts)
    while ts.peek().kind == "op" and ts.peek().text in ("*", "/"):
        tok = ts.next()
        node = BinOp(tok.text, node, _unary(ts), tok)
    return node


def _unary(ts):
    tok = ts.peek()
    if tok.kind == "op" and tok.text in "+-" and tok.text:
        ts.next()
        arg = _unary(ts)
        return Neg(arg, tok) if tok.text == "-" else arg
    return _power(ts)


def _power(ts):
    base = _atom(ts)
    if ts.at("^"):
        tok = ts.next()
        return BinOp("^", base, _unary(ts), tok)
    return base


def _atom(ts):
    tok = ts.peek()
    if tok.kind == "number":
        ts.next()
        return Num(Fraction(int(tok.text)), tok)
    if tok.kind == "ident":
        ts.next()
        if ts.at("("):
            ts.next()
            arg = parse_expression(ts)
            ts.expect(")")
            return Call(tok.text, arg, tok)
        return Name(tok.text, tok)
    if ts.at("("):
        ts.next()
        node = parse_expression(ts)
        ts.expect(")")
        return node
    shown = tok.text or "end of input"
    raise ts.error(f"unexpected '{shown}'", tok)


def parse_standalone(text: str, source: str | None = None):
    """Parse a complete expression, rejecting trailing input."""
    ts = TokenStream(tokenize(text, source), source)
    node = parse_expression(ts)
    if ts.peek().kind != "eof":
        raise ts.error(f"unexpected '{ts.peek().text}'")
    return node


# --- evaluation ----------------------------------------------------------------

def evaluate(node, lookup: Callable[[str, Token], Any],
             call: Callable[[str, Any, Token], Any] | None = None,
             wedge: Callable[[Any, Any], Any] | None = None,
             is_form: Callable[[Any], bool] = lambda v: False,
             source: str | None = None):
    """Fold an AST into values.

    ``lookup`` maps identifiers to values (raising on unknown names), ``call``
    handles ``f(x)`` applications, ``wedge`` implements ``^`` when an operand is
    a form.  Scalars must support the usual arithmetic operators.
    """

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Name):
            return lookup(n.name, n.tok)
        if isinstance(n, Call):
            if call is None:
                raise ParseError(f"function application '{n.func}(...)' not allowed here",
                                 n.tok.line, n.tok.col, source)
            return call(n.func, n.arg, n.tok)
        if isinstance(n, Neg):
            return -ev(n.arg)
        a = ev(n.left)
        b = ev(n.right)
        try:
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if n.op == "/":
                if is_form(b):
                    raise ParseError("cannot divide by a form", n.tok.line, n.tok.col, source)
                return a / b
            if is_form(a) or is_form(b):
                if wedge is None:
                    raise ParseError("forms are not allowed here", n.tok.line, n.tok.col, source)
                return wedge(a, b)
            return a ** _integer_exponent(b, n.tok, source)
        except ZeroDivisionError:
            raise ParseError("division by zero", n.tok.line, n.tok.col, source) from None
        except TypeError as exc:
            raise ParseError(str(exc), n.tok.line, n.tok.col, source) from None

    return ev(node)


def _integer_exponent(b, tok, source):
    value = b
    as_const = getattr(b, "constant_value", None)
    if as_const is not None:
        value = as_const()
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    raise ParseError("exponent must be an integer constant", tok.line, tok.col, source)


def unknown(name: str, tok: Token, source: str | None = None):
    return UnknownIdentifier(name, tok.line, tok.col, source)
