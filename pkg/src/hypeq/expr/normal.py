"""Canonical rational normal form.

An expression is mapped to a quotient of two polynomials over the rationals
whose generators are variables and *atoms* (elementary-function applications,
free-function symbols and rational-power roots).  Atoms are opaque except for
a small set of rewrites that keep the form canonical enough for exact
zero-testing:

* atom arguments are themselves normalized;
* ``exp`` arguments are split into monomial terms, ``exp(k*m)`` becomes a
  power of one shared atom ``exp(g*m)`` (``g`` the rational gcd of the
  coefficients of ``m`` in the expression), and ``exp(k*ln(B))`` becomes
  ``B^k``; ``ln(exp(B))`` becomes ``B``;
* ``sin, tan, sinh`` are odd and ``cos, cosh`` even in a negated argument;
* ``B^(p/q)`` becomes ``B^floor * A^k`` with one root atom ``A = B^(1/Q)``
  per base, and ``A^Q`` reduces back to ``B``;
* functions at constant arguments are evaluated when the value is rational.

Polynomial arithmetic and gcd cancellation use sympy's sparse rational
function field; generators are ordered bytewise by their rendered text and
monomials graded-lexicographically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

from sympy import QQ, Symbol
from sympy.polys.fields import field as _sympy_field
from sympy.polys.orderings import grlex

from ..errors import DivisionByZero, DomainViolation
from .nodes import (
    ONE,
    ZERO,
    Add,
    BinOp,
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
    walk,
)
from .render import render

_ODD = ("sin", "tan", "sinh")
_EVEN = ("cos", "cosh")
_AT_ZERO = {"exp": 1, "sin": 0, "tan": 0, "sinh": 0, "cos": 1, "cosh": 1}


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


@dataclass(frozen=True)
class RationalForm:
    """``num/den`` with ``den`` monic; terms are ``(exponents, coefficient)``."""

    gens: tuple
    num: tuple
    den: tuple

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and not any(self.den[0][0])

    @property
    def is_constant(self) -> bool:
        return self.is_zero or (self.is_polynomial and len(self.num) == 1 and not any(self.num[0][0]))

    @property
    def constant(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return self.num[0][1] / self.den[0][1]

    def monomial(self, exps) -> Expr:
        return _monomial_expr(self.gens, exps)

    def to_expr(self) -> Expr:
        num = _poly_expr(self.gens, self.num)
        if self.is_polynomial:
            c = self.den[0][1]
            return num if c == 1 else _poly_expr(self.gens, tuple((e, k / c) for e, k in self.num))
        return Div(num, _poly_expr(self.gens, self.den))

    def leading_coefficient(self) -> Fraction:
        return self.num[0][1] if self.num else Fraction(0)


def _monomial_expr(gens, exps, node=None) -> Expr:
    for g, e in zip(gens, exps):
        if e == 0:
            continue
        factor = g if e == 1 else Pow(g, e)
        node = factor if node is None else Mul(node, factor)
    return ONE if node is None else node


def _term_expr(gens, exps, coeff: Fraction) -> Expr:
    mono = _monomial_expr(gens, exps)
    if not any(exps):
        return Const(coeff)
    if coeff == 1:
        return mono
    if coeff == -1:
        return Neg(mono)
    return _monomial_expr(gens, exps, Const(coeff))


def _poly_expr(gens, terms) -> Expr:
    if not terms:
        return ZERO
    exps, coeff = terms[0]
    node = _term_expr(gens, exps, coeff)
    for exps, coeff in terms[1:]:
        if coeff < 0:
            node = Sub(node, _term_expr(gens, exps, -coeff))
        else:
            node = Add(node, _term_expr(gens, exps, coeff))
    return node


def normalize(e: Expr) -> Expr:
    """Canonical rational form of ``e`` as an expression tree (idempotent)."""
    return _normalize(e)


@lru_cache(maxsize=100_000)
def _normalize(e: Expr) -> Expr:
    return rational_form(e).to_expr()


def normalize_with_conditions(e: Expr):
    """Normal form plus the non-constant denominators that were divided by.

    Cancelling ``ux/ux`` to ``1`` is only valid where ``ux != 0``; those side
    conditions are returned so callers can record them as domain inequations.
    """
    conditions = []
    seen = set()
    for node in walk(e):
        den = None
        if isinstance(node, Div):
            den = node.right
        elif isinstance(node, Pow) and node.exponent < 0:
            den = node.base
        if den is None:
            continue
        nd = normalize(den)
        if isinstance(nd, Const) or nd in seen:
            continue
        seen.add(nd)
        conditions.append(nd)
    return normalize(e), tuple(conditions)


# ---------------------------------------------------------------- atoms


def _rational_gcd(values) -> Fraction:
    values = [abs(Fraction(v)) for v in values if v != 0]
    if not values:
        return Fraction(1)
    den = reduce(math.lcm, (v.denominator for v in values))
    num = reduce(math.gcd, (v.numerator * (den // v.denominator) for v in values))
    return Fraction(num, den)


def _exact_root(value: Fraction, q: int):
    if value < 0:
        if q % 2 == 0:
            return None
        r = _exact_root(-value, q)
        return None if r is None else -r

    def iroot(n):
        if n < 2:
            return n
        r = 1 << ((n.bit_length() + q - 1) // q)
        while True:
            nxt = ((q - 1) * r + n // r ** (q - 1)) // q
            if nxt >= r:
                break
            r = nxt
        return r if r**q == n else None

    p = iroot(value.numerator)
    d = iroot(value.denominator)
    if p is None or d is None:
        return None
    return Fraction(p, d)


@lru_cache(maxsize=50_000)
def _canon_pow(base: Expr, r: Fraction) -> Expr:
    """``base^r`` for normalized ``base`` and non-integer ``r``."""
    if isinstance(base, Const):
        v = base.value
        if v == 0:
            if r < 0:
                raise DivisionByZero("zero raised to a negative power")
            return ZERO
        root = _exact_root(v, r.denominator)
        if root is not None:
            return Const(root**r.numerator)
        if v < 0 and r.denominator % 2 == 0:
            raise DomainViolation(f"even root of negative constant {v}")
        return Pow(base, r)
    rf = rational_form(base)
    if len(rf.num) == 1 and len(rf.den) == 1:
        # products of exponentials are positive: (c*exp(a)^k)^r = c^r * exp(k*r*a)
        (ne, nc), (de, dc) = rf.num[0], rf.den[0]
        used = [(g, a - b) for g, a, b in zip(rf.gens, ne, de) if a != b]
        coeff = nc / dc
        if used and coeff > 0 and all(isinstance(g, Func) and g.name == "exp" for g, _ in used):
            croot = _exact_root(coeff, r.denominator)
            if croot is not None:
                total = ZERO
                for g, k in used:
                    total = Add(total, Mul(Const(Fraction(k) * r), g.arg))
                return _canon(Mul(Const(croot**r.numerator), Func("exp", total)), {})
    if r.denominator % 2 == 1 and len(rf.num) == 1 and len(rf.den) == 1:
        # odd roots distribute over monomial ratios
        (ne, nc), (de, dc) = rf.num[0], rf.den[0]
        exps = [Fraction(a - b) * r for a, b in zip(ne, de)]
        coeff = _exact_root(nc / dc, r.denominator)
        if coeff is not None and all(x.denominator == 1 for x in exps):
            node = Const(coeff**r.numerator)
            for g, x in zip(rf.gens, exps):
                if x != 0:
                    node = Mul(node, Pow(g, x))
            return node
    return Pow(base, r)


@lru_cache(maxsize=50_000)
def _canon_func(name: str, arg: Expr) -> Expr:
    """Canonical replacement for ``name(arg)`` with ``arg`` normalized."""
    if name == "sqrt":
        return _canon_pow(arg, Fraction(1, 2))
    if isinstance(arg, Const):
        v = arg.value
        if name == "ln":
            if v == 1:
                return ZERO
            if v == 0:
                raise DivisionByZero("ln(0)")
            if v < 0:
                raise DomainViolation(f"ln of negative constant {v}")
        elif v == 0:
            return Const(_AT_ZERO[name])
    if name == "ln":
        if isinstance(arg, Func) and arg.name == "exp":
            return arg.arg
        unwrapped = _ln_of_exponentials(arg)
        if unwrapped is not None:
            return unwrapped
        return Func("ln", arg)
    if name == "exp":
        return _canon_exp(arg)
    rf = rational_form(arg)
    if rf.leading_coefficient() < 0:
        flipped = normalize(Neg(arg))
        if name in _ODD:
            return Neg(Func(name, flipped))
        return Func(name, flipped)
    return Func(name, arg)


def _ln_of_exponentials(arg: Expr):
    """``ln(exp(a)^j * exp(b)^k)`` is ``j*a + k*b``; anything else is ``None``."""
    rf = rational_form(arg)
    if not rf.gens or len(rf.num) != 1 or len(rf.den) != 1 or rf.num[0][1] != 1:
        return None
    if not all(isinstance(g, Func) and g.name == "exp" for g in rf.gens):
        return None
    node = ZERO
    for g, a, b in zip(rf.gens, rf.num[0][0], rf.den[0][0]):
        node = Add(node, Mul(Const(a - b), g.arg))
    return normalize(node)


def _canon_exp(arg: Expr) -> Expr:
    rf = rational_form(arg)
    if not rf.is_polynomial:
        return Func("exp", arg)
    dc = rf.den[0][1]
    factors = []
    rest = []
    for exps, coeff in rf.num:
        coeff = coeff / dc
        hit = _single_ln(rf.gens, exps)
        if hit is not None:
            if coeff.denominator == 1:
                factors.append(Pow(hit, coeff) if coeff != 1 else hit)
            else:
                factors.append(_canon_pow(hit, coeff))
        else:
            rest.append((exps, coeff))
    if not factors:
        return Func("exp", arg)
    node = None
    for f in factors:
        node = f if node is None else Mul(node, f)
    if rest:
        node = Mul(node, Func("exp", _poly_expr(rf.gens, tuple(rest))))
    return node


def _single_ln(gens, exps):
    hit = None
    for g, e in zip(gens, exps):
        if e == 0:
            continue
        if e != 1 or hit is not None or not (isinstance(g, Func) and g.name == "ln"):
            return None
        hit = g.arg
    return hit


def _canon(e: Expr, memo) -> Expr:
    """Rebuild ``e`` with canonical atoms; arithmetic structure is kept."""
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, (Const, Var)):
        out = e
    elif isinstance(e, BinOp):
        spine = []
        node = e
        while isinstance(node, BinOp) and node not in memo:
            spine.append(node)
            node = node.left
        acc = _canon(node, memo)
        for item in reversed(spine):
            acc = type(item)(acc, _canon(item.right, memo))
            memo[item] = acc
        out = acc
    elif isinstance(e, Neg):
        out = Neg(_canon(e.arg, memo))
    elif isinstance(e, Pow):
        if e.exponent.denominator == 1:
            out = Pow(_canon(e.base, memo), e.exponent)
        else:
            out = _canon_pow(normalize(e.base), e.exponent)
    elif isinstance(e, Func):
        out = _canon_func(e.name, normalize(e.arg))
    elif isinstance(e, FreeFunc):
        out = FreeFunc(e.name, e.params, e.derivs, [normalize(a) for a in e.args])
    else:
        raise TypeError(f"cannot normalize {type(e).__name__}")
    memo[e] = out
    return out


# ---------------------------------------------------------------- conversion


def _exp_terms(arg: Expr):
    rf = rational_form(arg)
    if rf.is_polynomial:
        dc = rf.den[0][1]
        return [(rf.monomial(exps), coeff / dc) for exps, coeff in rf.num]
    lc = rf.leading_coefficient()
    return [(normalize(Div(arg, Const(lc))), lc)]


def _collect(c: Expr):
    gens = set()
    exp_nodes = {}
    roots = {}
    stack = [c]
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, Var):
            gens.add(node)
        elif isinstance(node, Func):
            if node.name == "exp":
                exp_nodes[node] = _exp_terms(node.arg)
            else:
                gens.add(node)
        elif isinstance(node, FreeFunc):
            gens.add(node)
        elif isinstance(node, Pow) and node.exponent.denominator != 1:
            q = node.exponent.denominator
            roots[node.base] = math.lcm(roots.get(node.base, 1), q)
            stack.append(node.base)
        else:
            stack.extend(node.children())
    return gens, exp_nodes, roots


@lru_cache(maxsize=100_000)
def rational_form(e: Expr) -> RationalForm:
    if isinstance(e, Const):
        if e.value == 0:
            return RationalForm((), (), (((), Fraction(1)),))
        return RationalForm((), (((), e.value),), (((), Fraction(1)),))
    c = _canon(e, {})
    gens, exp_nodes, roots = _collect(c)

    classes = {}
    for terms in exp_nodes.values():
        for m, k in terms:
            classes.setdefault(m, []).append(k)
    exp_atom = {}
    for m, ks in classes.items():
        g = _rational_gcd(ks)
        atom = Func("exp", normalize(Mul(Const(g), m)) if m != ONE else Const(g))
        exp_atom[m] = (atom, g)
        gens.add(atom)
    root_atom = {}
    for base, q in roots.items():
        atom = Pow(base, Fraction(1, q))
        root_atom[base] = (atom, q)
        gens.add(atom)

    ordered = sorted(gens, key=lambda g: render(g).encode())
    index = {g: i for i, g in enumerate(ordered)}
    symbols = [Symbol(f"_g{i}") for i in range(max(1, len(ordered)))]
    K, *kgens = _sympy_field(symbols, QQ, grlex)

    memo = {}

    def conv(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = K(QQ(node.value.numerator, node.value.denominator))
        elif isinstance(node, (Var, FreeFunc)):
            out = kgens[index[node]]
        elif isinstance(node, BinOp):
            spine = []
            cur = node
            while isinstance(cur, BinOp) and cur not in memo:
                spine.append(cur)
                cur = cur.left
            acc = conv(cur)
            for item in reversed(spine):
                r = conv(item.right)
                if isinstance(item, Add):
                    acc = acc + r
                elif isinstance(item, Sub):
                    acc = acc - r
                elif isinstance(item, Mul):
                    acc = acc * r
                else:
                    if r == 0:
                        raise DivisionByZero(f"division by an expression that normalizes to zero: {render(item.right)}")
                    acc = acc / r
                memo[item] = acc
            out = acc
        elif isinstance(node, Neg):
            out = -conv(node.arg)
        elif isinstance(node, Pow):
            r = node.exponent
            if r.denominator == 1:
                b = conv(node.base)
                if b == 0 and r < 0:
                    raise DivisionByZero(f"{render(node.base)} normalizes to zero under a negative power")
                out = b ** int(r)
            else:
                atom, q = root_atom[node.base]
                whole = math.floor(r)
                out = kgens[index[atom]] ** int((r - whole) * q)
                if whole:
                    b = conv(node.base)
                    out = out * b ** int(whole)
        elif isinstance(node, Func):
            if node.name == "exp":
                out = K(1)
                for m, k in exp_nodes[node]:
                    atom, g = exp_atom[m]
                    out = out * kgens[index[atom]] ** int(k / g)
            else:
                out = kgens[index[node]]
        else:
            raise TypeError(type(node).__name__)
        memo[node] = out
        return out

    value = conv(c)
    if root_atom:
        value = _reduce_roots(value, K, kgens, index, root_atom, conv)
    if value == 0:
        return RationalForm((), (), (((), Fraction(1)),))
    num = [(m, _frac(k)) for m, k in value.numer.terms()]
    den = [(m, _frac(k)) for m, k in value.denom.terms()]
    lc = den[0][1]
    num = [(m, k / lc) for m, k in num]
    den = [(m, k / lc) for m, k in den]
    used = [i for i in range(len(ordered)) if any(m[i] for m, _ in num) or any(m[i] for m, _ in den)]
    gens_out = tuple(ordered[i] for i in used)

    def squeeze(terms):
        return tuple((tuple(m[i] for i in used), k) for m, k in terms)

    return RationalForm(gens_out, squeeze(num), squeeze(den))


def _reduce_roots(value, K, kgens, index, root_atom, conv):
    """Rewrite ``(B^(1/Q))^Q`` as ``B`` in numerator and denominator."""
    reductions = [(index[atom], q, conv(base)) for base, (atom, q) in root_atom.items()]

    def reduce_poly(poly):
        out = K(0)
        changed = False
        for monom, coeff in poly.terms():
            term = K(coeff)
            for j, e in enumerate(monom):
                if e:
                    term = term * kgens[j] ** e
            for i, q, base in reductions:
                e = monom[i]
                if e >= q:
                    changed = True
                    term = term / kgens[i] ** (e - e % q) * base ** (e // q)
            out = out + term
        return out, changed

    for _ in range(8):
        num, c1 = reduce_poly(value.numer)
        den, c2 = reduce_poly(value.denom)
        if not (c1 or c2):
            break
        value = num / den
    return value


def is_normal_zero(e: Expr) -> bool:
    return rational_form(e).is_zero
