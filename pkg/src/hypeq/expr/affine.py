"""Splitting an expression into coefficients of ux, uy and ux*uy."""
from __future__ import annotations

from ..errors import Indeterminate, NotAffine
from .calculus import diff
from .nodes import Expr, Var, as_expr
from .normal import normalize
from .zero import SamplerConfig, is_zero


def _require_zero(e: Expr, what: str, config):
    st = is_zero(e, config)
    if st.proven_nonzero:
        raise NotAffine(f"{what} does not vanish: {st.describe()}", st)
    if st.unknown:
        raise Indeterminate(f"cannot decide whether {what} vanishes", {what: st})
    return st


def _free_of(coef: Expr, names, label, config):
    for v in names:
        if v in coef.free_variables:
            _require_zero(normalize(diff(coef, v)), f"d{label}/d{v}", config)


def affine_coefficients(e, vars=("ux", "uy"), config: SamplerConfig = None) -> dict:
    """Coefficients of ``e`` as an affine (or bilinear) function of ``vars``.

    One variable ``v`` gives ``{"F0", "F1"}`` with ``e = F0 + F1*v``; the pair
    ``(ux, uy)`` gives ``{"f0", "f1", "f2", "f3"}`` with
    ``e = f0 + f1*ux + f2*uy + f3*ux*uy``.
    """
    e = normalize(as_expr(e))
    vars = tuple(vars)
    if len(vars) == 1:
        (v,) = vars
        _require_zero(normalize(diff(e, v, v)), f"d2e/d{v}2", config)
        F1 = normalize(diff(e, v))
        _free_of(F1, vars, "F1", config)
        F0 = normalize(e - F1 * Var(v))
        _free_of(F0, vars, "F0", config)
        return {"F0": F0, "F1": F1}
    if set(vars) != {"ux", "uy"} or len(vars) != 2:
        raise ValueError(f"unsupported split variables {vars}")
    ux, uy = Var("ux"), Var("uy")
    _require_zero(normalize(diff(e, "ux", "ux")), "d2e/dux2", config)
    _require_zero(normalize(diff(e, "uy", "uy")), "d2e/duy2", config)
    f3 = normalize(diff(e, "ux", "uy"))
    _free_of(f3, ("ux", "uy"), "f3", config)
    f1 = normalize(diff(e, "ux") - f3 * uy)
    f2 = normalize(diff(e, "uy") - f3 * ux)
    _free_of(f1, ("ux", "uy"), "f1", config)
    _free_of(f2, ("ux", "uy"), "f2", config)
    f0 = normalize(e - f1 * ux - f2 * uy - f3 * ux * uy)
    _free_of(f0, ("ux", "uy"), "f0", config)
    return {"f0": f0, "f1": f1, "f2": f2, "f3": f3}
