"""Symbolic expressions over jet variables."""
import sys

from .nodes import (
    ELEMENTARY,
    MINUS_ONE,
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
    as_expr,
    cos,
    exp,
    func,
    ln,
    sin,
    sqrt,
    var,
    walk,
)
from .space import AUXILIARY, DEFAULT_SPACE, FIRST_JET, SECOND_JET, TILDE_FIRST_JET, VariableSpace, VarInfo
from .render import render
from .parser import parse
from .calculus import diff, differentiate, replace, substitute
from .normal import RationalForm, normalize, normalize_with_conditions, rational_form

# deep left spines are walked iteratively, but chains of nested atoms still recurse
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

from .numeric import Compiled, compile_expr, eval_complex, eval_numeric
from .zero import DEFAULT_SAMPLER, PROVEN_NONZERO, PROVEN_ZERO, UNKNOWN, SamplerConfig, ZeroStatus, is_zero
from .affine import affine_coefficients
from .integrate import adaptive_simpson, antiderivative, definite
