"""Seeded random expression trees for differentiation and normalization checks."""
import math
import random

from hypeq.errors import DivisionByZero, EvaluationError
from hypeq.expr import Const, Func, Var, compile_expr

VARS = ("x", "y", "u", "ux", "uy")
FUNCS = ("exp", "sin", "cos", "ln", "sqrt")


def random_expr(rng: random.Random, depth: int):
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return Var(rng.choice(VARS))
        return Const(rng.choice([1, 2, 3, -1, -2])) if rng.random() < 0.8 else Const(1) / Const(rng.choice([2, 3]))
    op = rng.choice("+-*/^ff")
    if op == "f":
        name = rng.choice(FUNCS)
        arg = random_expr(rng, depth - 1)
        if name in ("ln", "sqrt"):
            arg = arg * arg + 1  # keeps the argument positive
        if name == "exp" and depth > 3:
            name = "sin"
        return Func(name, arg)
    if op == "^":
        return random_expr(rng, depth - 1) ** rng.choice([2, 3, -1])
    a, b = random_expr(rng, depth - 1), random_expr(rng, depth - 1)
    if op == "/":
        try:
            return a / b
        except DivisionByZero:
            return a + b
    return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__}[op](b)


def random_point(rng, names, box=(-2.0, 2.0)):
    return {n: rng.uniform(*box) for n in names}


def corpus(n: int, seed: int = 2024, max_depth: int = 6):
    """``n`` pairs ``(expression, point)`` with the expression finite near the point."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        e = random_expr(rng, rng.randint(1, max_depth))
        names = sorted(e.free_variables)
        if not names:
            continue
        fn = compile_expr(e)
        for _ in range(20):
            p = random_point(rng, VARS)
            try:
                v = fn(p)
            except EvaluationError:
                continue
            if math.isfinite(v) and abs(v) < 1e6:
                out.append((e, p))
                break
    return out
