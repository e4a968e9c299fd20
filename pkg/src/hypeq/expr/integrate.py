"""Table-driven antiderivatives and adaptive Simpson quadrature.

The table is closed and small: powers of the variable, polynomial times
``exp``/``sin``/``cos``/``sinh``/``cosh`` of a linear argument (by parts),
rational roots of a linear base, ``ln`` of a linear argument, quotients
with a linear denominator, logarithmic derivatives ``g'/g``, substitution
``R' * F(R)`` for a single exponential or trigonometric atom, and
integration of a free-function derivative along its own slot.  Sums are
integrated termwise.  Anything outside raises :class:`IntegrationFailure`.
"""
from __future__ import annotations

import math
from fractions import Fraction

from ..errors import IntegrationFailure
from .calculus import diff, replace
from .nodes import ONE, ZERO, Const, Expr, FreeFunc, Func, Pow, Var, as_expr
from .normal import _poly_expr, normalize, rational_form
from .render import render

_BY_PARTS = {
    # F: (antiderivative of F(a v + b) scaled by a, derivative partner, sign)
    "sin": ("cos", -1),
    "cos": ("sin", 1),
    "sinh": ("cosh", 1),
    "cosh": ("sinh", 1),
}


def _free(e: Expr, v: str) -> bool:
    return v not in e.free_variables


def _linear_coefficient(arg: Expr, v: str):
    """``a`` when ``arg = a*v + b`` with ``a, b`` free of ``v`` (else None)."""
    a = normalize(diff(arg, v))
    if a == ZERO or not _free(a, v):
        return None
    return a


def antiderivative(e, v: str) -> Expr:
    """An antiderivative of ``e`` in ``v`` from the table, normalized."""
    e = normalize(as_expr(e))
    if _free(e, v):
        return normalize(e * Var(v))
    rf = rational_form(e)
    den_free = all(_free(g, v) for g, k in zip(rf.gens, _den_support(rf)) if k)
    if den_free or len(rf.den) == 1:
        dexps, dc = rf.den[0] if len(rf.den) == 1 else (None, None)
        den = _poly_expr(rf.gens, rf.den) if den_free else None
        total = ZERO
        for exps, coeff in rf.num:
            if den_free:
                part = _integrate_product(rf.gens, exps, coeff, v)
                total = total + part
            else:
                signed = tuple(a - b for a, b in zip(exps, dexps))
                total = total + _integrate_product(rf.gens, signed, coeff / dc, v)
        if den_free:
            total = total / den
        return normalize(total)
    result = _whole_rules(e, rf, v)
    if result is None:
        raise IntegrationFailure(f"no table antiderivative of {render(e)} in {v}")
    return normalize(result)


def _den_support(rf):
    support = [0] * len(rf.gens)
    for exps, _ in rf.den:
        for i, k in enumerate(exps):
            support[i] = support[i] or k
    return support


def _integrate_product(gens, exps, coeff: Fraction, v: str) -> Expr:
    const = Const(coeff)
    n = 0
    others = []
    for g, k in zip(gens, exps):
        if not k:
            continue
        if _free(g, v):
            const = const * Pow(g, k) if k != 1 else const * g
        elif isinstance(g, Var):
            n = k
        else:
            others.append((g, k))
    body = _table(n, others, v)
    if body is None:
        term = ONE
        for g, k in zip(gens, exps):
            if k and not _free(g, v):
                term = term * (g if k == 1 else Pow(g, k))
        term = normalize(term)
        body = _whole_rules(term, rational_form(term), v)
    if body is None:
        term = normalize(const * _monomial(gens, exps, v))
        raise IntegrationFailure(f"no table antiderivative of {render(term)} in {v}")
    return const * body


def _monomial(gens, exps, v):
    term = ONE
    for g, k in zip(gens, exps):
        if k and not _free(g, v):
            term = term * (g if k == 1 else Pow(g, k))
    return term


def _table(n: int, others, v: str):
    x = Var(v)
    if not others:
        if n == -1:
            return Func("ln", x)
        return Pow(x, n + 1) / Const(n + 1)
    if all(isinstance(g, Func) and g.name == "exp" for g, _ in others) and n >= 0:
        arg = normalize(sum((Const(k) * g.arg for g, k in others), ZERO))
        a = _linear_coefficient(arg, v)
        if a is not None:
            return _poly_times_exp(n, arg, a, x)
    if len(others) == 1 and n >= 0:
        g, k = others[0]
        if isinstance(g, Func) and g.name in _BY_PARTS and k == 1:
            a = _linear_coefficient(g.arg, v)
            if a is not None:
                return _poly_times_trig(n, g.name, g.arg, a, x)
        if isinstance(g, Pow) and n == 0:
            a = _linear_coefficient(g.base, v)
            if a is not None:
                r = g.exponent * k
                if r == -1:
                    return Func("ln", g.base) / a
                return Pow(g.base, r + 1) / (Const(r + 1) * a)
        if isinstance(g, Func) and g.name == "ln" and k == 1 and n == 0:
            a = _linear_coefficient(g.arg, v)
            if a is not None:
                return (g.arg * g - g.arg) / a
        if isinstance(g, FreeFunc) and k == 1 and n == 0:
            return _free_function_primitive(g, v)
    return None


def _poly_times_exp(n, arg, a, x):
    # integral of x^n e^(a x + b) = e^(a x + b) * sum_k (-1)^k n!/(n-k)! x^(n-k) / a^(k+1)
    total = ZERO
    for k in range(n + 1):
        c = Const((-1) ** k * math.factorial(n) // math.factorial(n - k))
        total = total + c * Pow(x, n - k) / Pow(a, k + 1) if n - k else total + c / Pow(a, k + 1)
    return Func("exp", arg) * total


def _poly_times_trig(n, name, arg, a, x):
    partner, sign = _BY_PARTS[name]
    # integral of x^n F = sign * x^n G / a - sign * n/a * integral of x^(n-1) G
    head = Const(sign) * Pow(x, n) * Func(partner, arg) / a if n else Const(sign) * Func(partner, arg) / a
    if n == 0:
        return head
    return head - Const(sign * n) * _poly_times_trig(n - 1, partner, arg, a, x) / a


def _free_function_primitive(g: FreeFunc, v: str):
    for slot, arg in enumerate(g.args):
        if arg == Var(v) and g.derivs[slot] > 0:
            if all(_free(a, v) for i, a in enumerate(g.args) if i != slot):
                derivs = list(g.derivs)
                derivs[slot] -= 1
                return FreeFunc(g.name, g.params, derivs, g.args)
    return None


def _whole_rules(e: Expr, rf, v: str):
    """Rules applying to a whole quotient rather than a single monomial."""
    if len(rf.den) > 1 or any(k for k in rf.den[0][0]):
        den = normalize(_poly_expr(rf.gens, rf.den))
        dden = normalize(diff(den, v))
        if dden != ZERO:
            q = normalize(e * den / dden)
            if _free(q, v):
                return q * Func("ln", den)
        a = _linear_coefficient(den, v)
        if a is not None:
            split = _divide_by_linear(normalize(_poly_expr(rf.gens, rf.num)), den, a, v)
            if split is not None:
                quotient, remainder = split
                return antiderivative(quotient, v) + remainder * Func("ln", den) / a
    # substitution through a single exponential or trigonometric atom
    for g in rf.gens:
        if isinstance(g, Func) and g.name in ("exp", "sin", "cos", "sinh", "cosh") and not _free(g, v):
            dR = normalize(diff(g.arg, v))
            if dR == ZERO:
                continue
            q = normalize(e / (dR * g))
            if _free(q, v):
                prim = {"exp": g, "sin": -Func("cos", g.arg), "cos": Func("sin", g.arg),
                        "sinh": Func("cosh", g.arg), "cosh": Func("sinh", g.arg)}[g.name]
                return q * prim
    exp_gens = [(g, i) for i, g in enumerate(rf.gens) if isinstance(g, Func) and g.name == "exp" and not _free(g, v)]
    if exp_gens and len(rf.num) == 1 and len(rf.den) == 1:
        exps = tuple(a - b for a, b in zip(rf.num[0][0], rf.den[0][0]))
        arg = normalize(sum((Const(exps[i]) * g.arg for g, i in exp_gens), ZERO))
        dA = normalize(diff(arg, v))
        if dA != ZERO:
            q = normalize(e / (dA * Func("exp", arg)))
            if _free(q, v):
                return q * Func("exp", arg)
    return None


def _divide_by_linear(num: Expr, den: Expr, a: Expr, v: str):
    """Synthetic division of a polynomial in ``v`` by ``den = a*v + b``."""
    coeffs = []
    cur = num
    k = 0
    while cur != ZERO:
        c = normalize(replace(cur, {v: ZERO}))
        if not _free(c, v):
            return None
        coeffs.append(normalize(c / Const(math.factorial(k))))
        cur = normalize(diff(cur, v))
        k += 1
        if k > 64:
            return None
    if not coeffs:
        return ZERO, ZERO
    b = normalize(replace(den, {v: ZERO}))
    root = normalize(-b / a)
    # Horner on p(v) = (v - root) q(v) + p(root), then divide by a
    q = []
    acc = ZERO
    for c in reversed(coeffs):
        acc = normalize(acc * root + c)
        q.append(acc)
    remainder = q.pop()
    quotient = ZERO
    for deg, c in enumerate(reversed(q)):
        quotient = quotient + c * Pow(Var(v), deg) if deg else quotient + c
    return normalize(quotient / a), remainder


def definite(e, v: str, lower, upper) -> Expr:
    """``F(upper) - F(lower)`` for the table antiderivative ``F``."""
    F = antiderivative(e, v)
    return normalize(replace(F, {v: as_expr(upper)}) - replace(F, {v: as_expr(lower)}))


def adaptive_simpson(fn, a: float, b: float, tol: float = 1e-10, max_depth: int = 48) -> float:
    """Adaptive composite Simpson quadrature with absolute target ``tol``."""
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) * (fa + 4 * fm + fb) / 6

    fa, fb = fn(a), fn(b)
    m = (a + b) / 2
    fm = fn(m)
    whole = simpson(fa, fm, fb, a, b)
    # explicit stack keeps the refinement order deterministic
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = (lo + hi) / 2
        lm, rm = (lo + mid) / 2, (mid + hi) / 2
        flm, frm = fn(lm), fn(rm)
        left = simpson(flo, flm, fmid, lo, mid)
        right = simpson(fmid, frm, fhi, mid, hi)
        if depth >= max_depth or abs(left + right - s) <= 15 * eps:
            total += left + right + (left + right - s) / 15
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
    return total
