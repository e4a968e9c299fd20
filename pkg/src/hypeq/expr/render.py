"""Text rendering in the parser's grammar (``parse(render(e)) == e`` for parsed trees)."""
from __future__ import annotations

from fractions import Fraction

from .nodes import (
    PREC_ATOM,
    PREC_POWER,
    PREC_PRODUCT,
    PREC_SUM,
    PREC_UNARY,
    BinOp,
    Const,
    Expr,
    FreeFunc,
    Func,
    Neg,
    Pow,
    Var,
)


def _decimal(value: Fraction):
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(value) * 10**digits
    whole, frac = divmod(int(scaled), 10**digits)
    text = f"{whole}.{frac:0{digits}d}"
    return "-" + text if value < 0 else text


def render_const(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    text = _decimal(value)
    if text is not None:
        return text
    return f"({value.numerator}/{value.denominator})"


def render_exponent(exponent: Fraction) -> str:
    if exponent.denominator == 1 and exponent >= 0:
        return str(exponent.numerator)
    if exponent.denominator == 1:
        return f"({exponent.numerator})"
    return f"({exponent.numerator}/{exponent.denominator})"


def _wrap(e: Expr, needs: bool) -> str:
    text = render(e)
    return f"({text})" if needs else text


def render(e: Expr) -> str:
    if isinstance(e, Const):
        return render_const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        return _render_binop(e)
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, e.arg.precedence < PREC_UNARY)
    if isinstance(e, Pow):
        return _wrap(e.base, e.base.precedence < PREC_ATOM) + "^" + render_exponent(e.exponent)
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, FreeFunc):
        return f"{e.symbol}({', '.join(render(a) for a in e.args)})"
    raise TypeError(f"cannot render {type(e).__name__}")


def _render_binop(e: BinOp) -> str:
    # iterate down the left spine so long sums do not recurse
    spine = []
    node = e
    while isinstance(node, BinOp) and node.precedence == e.precedence:
        spine.append(node)
        node = node.left
    level = e.precedence
    text = _wrap(node, node.precedence < level)
    for item in reversed(spine):
        right = item.right
        text += f" {item.op} " if level == PREC_SUM else item.op
        text += _wrap(right, right.precedence <= level)
    return text


__all__ = ["render", "render_const", "render_exponent", "PREC_POWER", "PREC_PRODUCT"]
