"""Total derivatives on the jet space up to order two."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import JetOrderError
from .expr import Expr, Var, as_expr, diff, normalize, replace
from .expr.space import FIRST_JET, SECOND_JET, TILDE_FIRST_JET

JET2 = FIRST_JET + SECOND_JET
TILDE_SECOND_JET = ("tuxx", "tuxy", "tuyy")

_TO_TILDE = dict(zip(FIRST_JET + SECOND_JET, TILDE_FIRST_JET + TILDE_SECOND_JET))
_FROM_TILDE = {v: k for k, v in _TO_TILDE.items()}


@dataclass(frozen=True)
class JetPoint2:
    x: float
    y: float
    u: float
    ux: float
    uy: float
    uxx: float
    uxy: float
    uyy: float
    on_equation: bool = False

    def __post_init__(self):
        for name in JET2:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"jet coordinate {name} is not finite")

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in JET2}

    def first(self) -> dict:
        return {n: getattr(self, n) for n in FIRST_JET}

    def to_json(self) -> dict:
        return asdict(self)


def _axis(axis: str):
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', not {axis!r}")
    return axis


def truncated_total_derivative(e, axis: str) -> Expr:
    """``D^_x = d_x + ux d_u`` (or the ``y`` analogue); jets of ``u`` are untouched."""
    axis = _axis(axis)
    e = as_expr(e)
    return normalize(diff(e, axis) + Var("u" + axis) * diff(e, "u"))


def total_derivative2(e, axis: str) -> Expr:
    """Full total derivative of a first-order expression, landing in the second jet."""
    axis = _axis(axis)
    e = as_expr(e)
    high = e.free_variables & set(SECOND_JET)
    if high:
        raise JetOrderError(f"total derivative of an expression depending on {sorted(high)} would need third jets")
    if axis == "x":
        out = diff(e, "x") + Var("ux") * diff(e, "u") + Var("uxx") * diff(e, "ux") + Var("uxy") * diff(e, "uy")
    else:
        out = diff(e, "y") + Var("uy") * diff(e, "u") + Var("uxy") * diff(e, "ux") + Var("uyy") * diff(e, "uy")
    return normalize(out)


_CHARACTERISTIC = {
    "d_ux": "d_ux",
    "ux": "d_ux",
    "d_uy": "d_uy",
    "uy": "d_uy",
    "Dx+f*d_uy": "Dx",
    "Dx": "Dx",
    "Dy+f*d_ux": "Dy",
    "Dy": "Dy",
}


def characteristic_apply(e, f, which: str) -> Expr:
    """Apply one of ``d_ux``, ``d_uy``, ``D^_x + f d_uy``, ``D^_y + f d_ux``."""
    try:
        op = _CHARACTERISTIC[which]
    except KeyError:
        raise ValueError(f"unknown characteristic operator {which!r}") from None
    e, f = as_expr(e), as_expr(f)
    if op == "d_ux":
        return normalize(diff(e, "ux"))
    if op == "d_uy":
        return normalize(diff(e, "uy"))
    if op == "Dx":
        return normalize(truncated_total_derivative(e, "x") + f * diff(e, "uy"))
    return normalize(truncated_total_derivative(e, "y") + f * diff(e, "ux"))


def to_tilde(e) -> Expr:
    """Rename source jet variables to the tilde family (``x`` to ``tx`` ...)."""
    return replace(as_expr(e), {k: Var(v) for k, v in _TO_TILDE.items()})


def from_tilde(e) -> Expr:
    return replace(as_expr(e), {k: Var(v) for k, v in _FROM_TILDE.items()})


def swap_xy(e) -> Expr:
    """The permutation (x, ux, uxx) <-> (y, uy, uyy) applied to an expression."""
    pairs = {"x": "y", "y": "x", "ux": "uy", "uy": "ux", "uxx": "uyy", "uyy": "uxx"}
    return replace(as_expr(e), {k: Var(v) for k, v in pairs.items()})
