"""Floating-point evaluation through compiled straight-line code.

Expressions are lowered once to a flat sequence of assignments (one per
distinct subtree) and compiled with ``exec``.  The real mode uses ``math``;
the complex mode uses ``cmath`` and exists for complex-step differentiation,
where the imaginary perturbation is tiny and branch decisions follow the real
part.
"""
from __future__ import annotations

import cmath
import hashlib
import math
import struct
from functools import lru_cache
from typing import Callable, Mapping, Optional

from ..errors import DomainViolation, EvaluationError, PoleEncountered, UnboundVariable
from .nodes import Add, Const, Div, Expr, FreeFunc, Func, Mul, Neg, Pow, Sub, Var


def pseudo_random_function(name: str, derivs: tuple, args: tuple) -> float:
    """Deterministic stand-in value for an unspecified function at a point.

    Distinct derivative atoms and distinct argument values give independent
    values in ``[-2, 2]``; equal arguments give equal values.
    """
    key = repr((name, tuple(derivs), tuple(round(float(a.real if isinstance(a, complex) else a), 12) for a in args)))
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    (n,) = struct.unpack("<Q", digest)
    return -2.0 + 4.0 * n / 2**64


# ---------------------------------------------------------------- helpers


def _r_div(a, b):
    if b == 0:
        raise PoleEncountered("division by zero")
    return a / b


def _r_ln(a):
    if a == 0:
        raise PoleEncountered("ln(0)")
    if a < 0:
        raise DomainViolation(f"ln of negative value {a}")
    return math.log(a)


def _r_sqrt(a):
    if a < 0:
        raise DomainViolation(f"sqrt of negative value {a}")
    return math.sqrt(a)


def _r_exp(a):
    try:
        return math.exp(a)
    except OverflowError:
        raise PoleEncountered(f"exp overflow at {a}") from None


def _r_tan(a):
    c = math.cos(a)
    if abs(c) < 1e-300:
        raise PoleEncountered("tan pole")
    return math.tan(a)


def _r_ipow(a, n):
    if a == 0 and n < 0:
        raise PoleEncountered("zero to a negative power")
    return a**n


def _r_rpow(a, p, q):
    # real q-th roots; odd q extends to negative bases
    if a == 0:
        if p < 0:
            raise PoleEncountered("zero to a negative power")
        return 0.0
    if a < 0:
        if q % 2 == 0:
            raise DomainViolation(f"even root of negative value {a}")
        mag = (-a) ** (p / q)
        return -mag if p % 2 else mag
    return a ** (p / q)


def _c_div(a, b):
    if b == 0:
        raise PoleEncountered("division by zero")
    return a / b


def _c_ln(a):
    if a.real == 0 and a.imag == 0:
        raise PoleEncountered("ln(0)")
    if a.real <= 0:
        raise DomainViolation(f"ln outside the positive reals at {a}")
    return cmath.log(a)


def _c_sqrt(a):
    if a.real < 0:
        raise DomainViolation(f"sqrt of negative value {a}")
    return cmath.sqrt(a)


def _c_exp(a):
    try:
        return cmath.exp(a)
    except OverflowError:
        raise PoleEncountered(f"exp overflow at {a}") from None


def _c_tan(a):
    if abs(cmath.cos(a)) < 1e-300:
        raise PoleEncountered("tan pole")
    return cmath.tan(a)


def _c_ipow(a, n):
    if a == 0 and n < 0:
        raise PoleEncountered("zero to a negative power")
    return a**n


def _c_rpow(a, p, q):
    if a == 0:
        if p < 0:
            raise PoleEncountered("zero to a negative power")
        return 0j
    if a.real < 0:
        if q % 2 == 0:
            raise DomainViolation(f"even root of negative value {a}")
        mag = (-a) ** (p / q)
        return -mag if p % 2 else mag
    return a ** (p / q)


_REAL = {
    "_div": _r_div,
    "_ipow": _r_ipow,
    "_rpow": _r_rpow,
    "_exp": _r_exp,
    "_ln": _r_ln,
    "_sin": math.sin,
    "_cos": math.cos,
    "_tan": _r_tan,
    "_sinh": math.sinh,
    "_cosh": math.cosh,
    "_sqrt": _r_sqrt,
}
_COMPLEX = {
    "_div": _c_div,
    "_ipow": _c_ipow,
    "_rpow": _c_rpow,
    "_exp": _c_exp,
    "_ln": _c_ln,
    "_sin": cmath.sin,
    "_cos": cmath.cos,
    "_tan": _c_tan,
    "_sinh": cmath.sinh,
    "_cosh": cmath.cosh,
    "_sqrt": _c_sqrt,
}


class Compiled:
    """A compiled expression; call with a mapping from variable names to numbers."""

    def __init__(self, e: Expr, mode: str = "real"):
        if mode not in ("real", "complex"):
            raise ValueError(mode)
        self.expr = e
        self.mode = mode
        self.names = tuple(sorted(e.free_variables))
        self.free_functions = []
        source = self._lower(e)
        scope = dict(_REAL if mode == "real" else _COMPLEX)
        scope["_ff"] = self._free_function
        scope["_resolver"] = None
        exec(compile(source, "<hypeq-expr>", "exec"), scope)
        self._fn = scope["_compiled"]
        self._scope = scope

    def _lower(self, e: Expr) -> str:
        lines = []
        temps = {}
        params = {n: f"v{i}" for i, n in enumerate(self.names)}
        counter = [0]

        def emit(code):
            name = f"t{counter[0]}"
            counter[0] += 1
            lines.append(f"    {name} = {code}")
            return name

        stack = [(e, False)]
        while stack:
            node, ready = stack.pop()
            if node in temps:
                continue
            if isinstance(node, Const):
                temps[node] = repr(float(node.value)) if self.mode == "real" else f"complex({float(node.value)!r})"
                continue
            if isinstance(node, Var):
                temps[node] = params[node.name]
                continue
            kids = node.children()
            if not ready:
                stack.append((node, True))
                stack.extend((k, False) for k in reversed(kids) if k not in temps)
                continue
            if isinstance(node, (Add, Sub, Mul)):
                temps[node] = emit(f"{temps[node.left]} {node.op} {temps[node.right]}")
            elif isinstance(node, Div):
                temps[node] = emit(f"_div({temps[node.left]}, {temps[node.right]})")
            elif isinstance(node, Neg):
                temps[node] = emit(f"-{temps[node.arg]}")
            elif isinstance(node, Pow):
                r = node.exponent
                if r.denominator == 1:
                    temps[node] = emit(f"_ipow({temps[node.base]}, {r.numerator})")
                else:
                    temps[node] = emit(f"_rpow({temps[node.base]}, {r.numerator}, {r.denominator})")
            elif isinstance(node, Func):
                temps[node] = emit(f"_{node.name}({temps[node.arg]})")
            elif isinstance(node, FreeFunc):
                idx = len(self.free_functions)
                self.free_functions.append((node.name, node.derivs))
                args = ", ".join(temps[a] for a in node.args)
                temps[node] = emit(f"_ff({idx}, ({args},))")
            else:
                raise TypeError(type(node).__name__)
        signature = ", ".join(params[n] for n in self.names)
        body = "\n".join(lines) if lines else "    pass"
        return f"def _compiled({signature}):\n{body}\n    return {temps[e]}\n"

    def _free_function(self, idx, args):
        name, derivs = self.free_functions[idx]
        resolver = self._scope["_resolver"]
        if resolver is not None:
            return resolver(name, derivs, args)
        if self.mode == "complex":
            raise EvaluationError(f"free function {name} has no analytic values for complex evaluation")
        return pseudo_random_function(name, derivs, args)

    def at(self, *values, resolver: Optional[Callable] = None):
        """Evaluate with positional values in ``self.names`` order."""
        self._scope["_resolver"] = resolver
        try:
            value = self._fn(*values)
        except ZeroDivisionError as exc:
            raise PoleEncountered(str(exc)) from None
        except OverflowError as exc:
            raise PoleEncountered(str(exc)) from None
        except ValueError as exc:
            raise DomainViolation(str(exc)) from None
        finally:
            self._scope["_resolver"] = None
        if self.mode == "real":
            if not math.isfinite(value):
                raise PoleEncountered(f"non-finite value {value}")
        elif not cmath.isfinite(value):
            raise PoleEncountered(f"non-finite value {value}")
        return value

    def __call__(self, point: Mapping, resolver: Optional[Callable] = None):
        try:
            values = [point[n] for n in self.names]
        except KeyError as exc:
            raise UnboundVariable(f"variable {exc.args[0]!r} is not bound") from None
        if self.mode == "real":
            values = [float(v) for v in values]
        else:
            values = [complex(v) for v in values]
        return self.at(*values, resolver=resolver)


@lru_cache(maxsize=20_000)
def compile_expr(e: Expr, mode: str = "real") -> Compiled:
    return Compiled(e, mode)


def eval_numeric(e: Expr, point: Mapping, resolver: Optional[Callable] = None) -> float:
    """IEEE double value of ``e`` at ``point``; non-finite results raise PoleEncountered."""
    return compile_expr(e, "real")(point, resolver)


def eval_complex(e: Expr, point: Mapping, resolver: Optional[Callable] = None) -> complex:
    return compile_expr(e, "complex")(point, resolver)
