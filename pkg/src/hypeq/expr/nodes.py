"""Immutable expression trees over jet variables.

Nodes compare structurally and cache their hash.  Arithmetic operators build
new trees through the simplifying constructors (``add``, ``mul``, ...), which
fold constants and drop neutral elements but otherwise keep the shape; the
canonical rational form lives in :mod:`hypeq.expr.normal`.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

ELEMENTARY = ("exp", "ln", "sin", "cos", "tan", "sinh", "cosh", "sqrt")

# binding strength used by the renderer
PREC_SUM, PREC_PRODUCT, PREC_UNARY, PREC_POWER, PREC_ATOM = 1, 2, 3, 4, 5


class Expr:
    __slots__ = ("_hash", "_free")

    def __init__(self):
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_free", None)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _key(self):
        raise NotImplementedError

    def __reduce__(self):
        return (type(self), self._key())

    def __eq__(self, other):
        if self is other:
            return True
        return type(self) is type(other) and hash(self) == hash(other) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
        return h

    def children(self):
        return ()

    @property
    def free_variables(self) -> frozenset:
        fv = self._free
        if fv is None:
            fv = frozenset().union(*(c.free_variables for c in self.children()))
            object.__setattr__(self, "_free", fv)
        return fv

    def depends_on(self, name: str) -> bool:
        return name in self.free_variables

    @property
    def precedence(self) -> int:
        return PREC_ATOM

    # operator sugar goes through the simplifying constructors
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __str__(self):
        from .render import render

        return render(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        object.__setattr__(self, "value", Fraction(value))

    def _key(self):
        return (self.value,)

    @property
    def precedence(self):
        v = self.value
        if v < 0:
            return PREC_UNARY
        return PREC_ATOM


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_free", frozenset((name,)))

    def _key(self):
        return (self.name,)


class BinOp(Expr):
    __slots__ = ("left", "right")
    op = "?"

    def __init__(self, left: Expr, right: Expr):
        super().__init__()
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _key(self):
        return (self.left, self.right)

    def children(self):
        return (self.left, self.right)


class Add(BinOp):
    __slots__ = ()
    op = "+"
    precedence = PREC_SUM


class Sub(BinOp):
    __slots__ = ()
    op = "-"
    precedence = PREC_SUM


class Mul(BinOp):
    __slots__ = ()
    op = "*"
    precedence = PREC_PRODUCT


class Div(BinOp):
    __slots__ = ()
    op = "/"
    precedence = PREC_PRODUCT


class Neg(Expr):
    __slots__ = ("arg",)
    precedence = PREC_UNARY

    def __init__(self, arg: Expr):
        super().__init__()
        object.__setattr__(self, "arg", arg)

    def _key(self):
        return (self.arg,)

    def children(self):
        return (self.arg,)


class Pow(Expr):
    """``base ^ exponent`` with a rational constant exponent."""

    __slots__ = ("base", "exponent")
    precedence = PREC_POWER

    def __init__(self, base: Expr, exponent):
        super().__init__()
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", Fraction(exponent))

    def _key(self):
        return (self.base, self.exponent)

    def children(self):
        return (self.base,)


class Func(Expr):
    """Elementary function application, opaque to the rational normal form."""

    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        super().__init__()
        if name not in ELEMENTARY:
            raise ValueError(f"unknown elementary function {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def _key(self):
        return (self.name, self.arg)

    def children(self):
        return (self.arg,)


class FreeFunc(Expr):
    """Unevaluated function symbol, possibly differentiated.

    ``params`` names the argument slots and ``derivs`` counts derivatives per
    slot, so ``theta_xu(x, y, u)`` has derivs ``(1, 0, 1)``.
    """

    __slots__ = ("name", "params", "derivs", "args")

    def __init__(self, name, params, derivs, args):
        super().__init__()
        params = tuple(params)
        derivs = tuple(int(d) for d in derivs)
        args = tuple(args)
        if not (len(params) == len(derivs) == len(args)):
            raise ValueError("free function slots, derivative counts and arguments must align")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "derivs", derivs)
        object.__setattr__(self, "args", args)

    def _key(self):
        return (self.name, self.params, self.derivs, self.args)

    def children(self):
        return self.args

    @property
    def symbol(self) -> str:
        if not any(self.derivs):
            return self.name
        suffix = "".join(p * d for p, d in zip(self.params, self.derivs))
        return f"{self.name}_{suffix}"

    def differentiated(self, slot: int) -> "FreeFunc":
        derivs = list(self.derivs)
        derivs[slot] += 1
        return FreeFunc(self.name, self.params, derivs, self.args)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction, Rational)):
        return Const(value)
    if isinstance(value, float):
        return Const(Fraction(value).limit_denominator(10**12))
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an expression")


def is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if is_const(a, 0):
        return b
    if is_const(b, 0):
        return a
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    if isinstance(b, Const) and b.value < 0:
        return Sub(a, Const(-b.value))
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if is_const(b, 0):
        return a
    if is_const(a, 0):
        return neg(b)
    if a == b:
        return ZERO
    if isinstance(b, Neg):
        return Add(a, b.arg)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if is_const(a, 0) or is_const(b, 0):
        return ZERO
    if is_const(a, 1):
        return b
    if is_const(b, 1):
        return a
    if is_const(a, -1):
        return neg(b)
    if is_const(b, -1):
        return neg(a)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if is_const(b, 0):
        from ..errors import DivisionByZero

        raise DivisionByZero("division by the zero constant")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    if is_const(a, 0):
        return ZERO
    if is_const(b, 1):
        return a
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(base: Expr, exponent) -> Expr:
    exponent = Fraction(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if exponent.denominator == 1:
            if base.value == 0 and exponent < 0:
                from ..errors import DivisionByZero

                raise DivisionByZero("zero raised to a negative power")
            return Const(base.value ** exponent.numerator)
        if base.value in (0, 1):
            return base
    if isinstance(base, Pow) and exponent.denominator == 1:
        return power(base.base, base.exponent * exponent)
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if name == "log":
        name = "ln"
    return Func(name, as_expr(arg))


def var(name: str) -> Var:
    return Var(name)


def exp(a) -> Expr:
    return Func("exp", as_expr(a))


def ln(a) -> Expr:
    return Func("ln", as_expr(a))


def sin(a) -> Expr:
    return Func("sin", as_expr(a))


def cos(a) -> Expr:
    return Func("cos", as_expr(a))


def sqrt(a) -> Expr:
    return Func("sqrt", as_expr(a))


def walk(e: Expr):
    """Pre-order traversal without recursion."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def nodes_of_type(e: Expr, cls):
    seen = set()
    for node in walk(e):
        if isinstance(node, cls) and node not in seen:
            seen.add(node)
            yield node
