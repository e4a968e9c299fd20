"""Exact partial differentiation and simultaneous substitution."""
from __future__ import annotations

from functools import lru_cache
from typing import Mapping

from ..errors import UnknownIdentifier
from .nodes import (
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    Expr,
    FreeFunc,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    add,
    as_expr,
    div,
    func,
    mul,
    neg,
    power,
    sub,
)
from .space import VariableSpace


def differentiate(e: Expr, v: str, space: VariableSpace = None) -> Expr:
    """Partial derivative of ``e`` with respect to the variable named ``v``.

    Every declared name is an independent coordinate; free-function symbols
    produce derivative atoms through the chain rule.
    """
    if space is not None and v not in space.variables:
        raise UnknownIdentifier(f"unknown identifier {v!r}", 0, v)
    return _d(e, v)


def diff(e: Expr, *names: str) -> Expr:
    for name in names:
        e = _d(e, name)
    return e


@lru_cache(maxsize=200_000)
def _d(e: Expr, v: str) -> Expr:
    if v not in e.free_variables:
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return add(_d(e.left, v), _d(e.right, v))
    if isinstance(e, Sub):
        return sub(_d(e.left, v), _d(e.right, v))
    if isinstance(e, Mul):
        return add(mul(_d(e.left, v), e.right), mul(e.left, _d(e.right, v)))
    if isinstance(e, Div):
        a, b = e.left, e.right
        da, db = _d(a, v), _d(b, v)
        first = div(da, b)
        if db == ZERO:
            return first
        return sub(first, div(mul(a, db), power(b, 2)))
    if isinstance(e, Neg):
        return neg(_d(e.arg, v))
    if isinstance(e, Pow):
        r = e.exponent
        return mul(mul(Const(r), power(e.base, r - 1)), _d(e.base, v))
    if isinstance(e, Func):
        return mul(_outer_derivative(e), _d(e.arg, v))
    if isinstance(e, FreeFunc):
        total = ZERO
        for slot, arg in enumerate(e.args):
            darg = _d(arg, v)
            if darg != ZERO:
                total = add(total, mul(e.differentiated(slot), darg))
        return total
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def _outer_derivative(e: Func) -> Expr:
    a = e.arg
    name = e.name
    if name == "exp":
        return e
    if name == "ln":
        return div(ONE, a)
    if name == "sin":
        return func("cos", a)
    if name == "cos":
        return neg(func("sin", a))
    if name == "tan":
        return add(ONE, power(e, 2))
    if name == "sinh":
        return func("cosh", a)
    if name == "cosh":
        return func("sinh", a)
    if name == "sqrt":
        return div(ONE, mul(Const(2), e))
    raise ValueError(name)


def replace(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution without normalization."""
    bindings = {k: as_expr(v) for k, v in bindings.items()}
    if not bindings or not (e.free_variables & bindings.keys()):
        return e
    memo = {}
    return _replace(e, bindings, memo)


def _replace(e: Expr, b, memo) -> Expr:
    if not (e.free_variables & b.keys()):
        return e
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Var):
        out = b[e.name]
    elif isinstance(e, (Add, Sub, Mul, Div)):
        # keep long left spines iterative
        spine = []
        node = e
        while isinstance(node, (Add, Sub, Mul, Div)) and node.free_variables & b.keys() and node not in memo:
            spine.append(node)
            node = node.left
        acc = _replace(node, b, memo)
        for item in reversed(spine):
            acc = type(item)(acc, _replace(item.right, b, memo))
            memo[item] = acc
        out = acc
    elif isinstance(e, Neg):
        out = Neg(_replace(e.arg, b, memo))
    elif isinstance(e, Pow):
        out = Pow(_replace(e.base, b, memo), e.exponent)
    elif isinstance(e, Func):
        out = Func(e.name, _replace(e.arg, b, memo))
    elif isinstance(e, FreeFunc):
        out = FreeFunc(e.name, e.params, e.derivs, [_replace(a, b, memo) for a in e.args])
    else:
        out = e
    memo[e] = out
    return out


def substitute(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution followed by normalization (the pullback)."""
    from .normal import normalize

    return normalize(replace(e, bindings))
