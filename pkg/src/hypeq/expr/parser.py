"""Recursive-descent parser for the expression grammar.

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
    atom     := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

``**`` is accepted as a synonym for ``^``.  Unary minus binds looser than
``^``, so ``-u^2`` is ``-(u^2)``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError, UnknownIdentifier
from .nodes import ELEMENTARY, Add, Const, Div, Expr, FreeFunc, Func, Mul, Neg, Pow, Sub, Var
from .space import DEFAULT_SPACE, VariableSpace

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^(),]))"
)
_ALIASES = {"log": "ln"}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                start = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[start]!r}", start, text)
            kind = m.lastgroup
            value = m.group(kind)
            if value == "**":
                value = "^"
            self.items.append((kind, value, m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        if self.i < len(self.items):
            return self.items[self.i]
        return ("end", None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def accept(self, op):
        kind, value, _ = self.peek()
        if kind == "op" and value == op:
            self.i += 1
            return True
        return False

    def expect(self, op):
        kind, value, pos = self.peek()
        if not (kind == "op" and value == op):
            found = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected {op!r}, found {found}", pos, self.text)
        self.i += 1


def parse(text: str, space: VariableSpace = None) -> Expr:
    """Parse ``text`` into an expression over the variables declared in ``space``."""
    space = space or DEFAULT_SPACE
    toks = _Tokens(text)
    if toks.peek()[0] == "end":
        raise ParseError("empty expression", 0, text)
    result = _Parser(toks, space).expr()
    kind, value, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {value!r}", pos, text)
    return result


class _Parser:
    def __init__(self, toks: _Tokens, space: VariableSpace):
        self.t = toks
        self.space = space

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.t.accept("+"):
                node = Add(node, self.term())
            elif self.t.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.t.accept("*"):
                node = Mul(node, self.unary())
            elif self.t.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.t.accept("-"):
            inner = self.unary()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.t.accept("^"):
            return Pow(base, self.exponent())
        return base

    def _number(self) -> Fraction:
        kind, value, pos = self.t.next()
        if kind != "num":
            found = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"exponent must be a rational constant, found {found}", pos, self.t.text)
        return Fraction(value)

    def exponent(self) -> Fraction:
        if self.t.accept("("):
            sign = -1 if self.t.accept("-") else 1
            value = self._number()
            if self.t.accept("/"):
                den = self._number()
                if den == 0:
                    raise ParseError("zero denominator in exponent", self.t.peek()[2], self.t.text)
                value = value / den
            self.t.expect(")")
            return sign * value
        sign = -1 if self.t.accept("-") else 1
        return sign * self._number()

    def atom(self) -> Expr:
        kind, value, pos = self.t.next()
        if kind == "num":
            return Const(Fraction(value))
        if kind == "op" and value == "(":
            node = self.expr()
            self.t.expect(")")
            return node
        if kind == "name":
            if self.t.peek()[:2] == ("op", "("):
                return self.call(value, pos)
            if value in self.space.variables:
                return Var(value)
            raise UnknownIdentifier(f"unknown identifier {value!r}", pos, self.t.text)
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {found}", pos, self.t.text)

    def call(self, name: str, pos: int) -> Expr:
        self.t.expect("(")
        args = [self.expr()]
        while self.t.accept(","):
            args.append(self.expr())
        self.t.expect(")")
        fname = _ALIASES.get(name, name)
        if fname in ELEMENTARY:
            if len(args) != 1:
                raise ParseError(f"{fname} takes one argument", pos, self.t.text)
            return Func(fname, args[0])
        resolved = resolve_free_function(name, self.space)
        if resolved is None:
            raise UnknownIdentifier(f"unknown function {name!r}", pos, self.t.text)
        base, params, derivs = resolved
        if len(args) != len(params):
            raise ParseError(f"{base} takes {len(params)} arguments", pos, self.t.text)
        return FreeFunc(base, params, derivs, args)


def resolve_free_function(symbol: str, space: VariableSpace):
    """Split ``theta_xu`` into (``theta``, params, derivative counts)."""
    if symbol in space.functions:
        params = space.functions[symbol]
        return symbol, params, (0,) * len(params)
    head, sep, suffix = symbol.rpartition("_")
    while sep:
        if head in space.functions and suffix:
            params = space.functions[head]
            counts = _split_suffix(suffix, params)
            if counts is not None:
                return head, params, counts
        head, sep, more = head.rpartition("_")
        suffix = more + "_" + suffix
    return None


def _split_suffix(suffix: str, params):
    counts = [0] * len(params)
    order = sorted(range(len(params)), key=lambda i: -len(params[i]))
    pos = 0
    while pos < len(suffix):
        for i in order:
            if suffix.startswith(params[i], pos):
                counts[i] += 1
                pos += len(params[i])
                break
        else:
            return None
    return tuple(counts)
