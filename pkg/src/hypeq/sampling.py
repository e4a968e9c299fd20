"""Seeded point sampling shared by the verification routines."""
from __future__ import annotations

import random
from typing import Iterable, Sequence

from .errors import EvaluationError, PoleEncountered
from .expr import Expr, as_expr, compile_expr

DEFAULT_BOX = (-2.0, 2.0)
DEFAULT_SEED = 42
DOMAIN_MARGIN = 1e-6


def parse_box(text) -> tuple:
    """``"lo:hi"`` or a pair to a float tuple."""
    if isinstance(text, str):
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"box must look like lo:hi, got {text!r}")
        box = (float(lo), float(hi))
    else:
        box = tuple(float(v) for v in text)
    if len(box) != 2 or not box[0] < box[1]:
        raise ValueError(f"box bounds must satisfy lo < hi, got {box}")
    return box


def sample_points(
    names: Sequence[str],
    n: int,
    box=DEFAULT_BOX,
    seed: int = DEFAULT_SEED,
    avoid: Iterable = (),
    require: Iterable = (),
    margin: float = DOMAIN_MARGIN,
    max_attempts: int = 100,
) -> list:
    """``n`` points uniform in ``box`` for ``names``.

    Points where an ``avoid`` expression is within ``margin`` of zero, or where
    any ``avoid``/``require`` expression fails to evaluate, are redrawn; after
    ``n * max_attempts`` draws a :class:`PoleEncountered` is raised.
    """
    avoid_c = [compile_expr(as_expr(a)) for a in avoid]
    require_c = [compile_expr(as_expr(r)) for r in require]
    lo, hi = box
    rng = random.Random(seed)
    points = []
    attempts = 0
    while len(points) < n:
        attempts += 1
        if attempts > max(1, n) * max_attempts:
            raise PoleEncountered(f"could only draw {len(points)} of {n} admissible points in box {box}")
        point = {name: rng.uniform(lo, hi) for name in names}
        try:
            if any(abs(a(point)) < margin for a in avoid_c):
                continue
            for r in require_c:
                r(point)
        except EvaluationError:
            continue
        points.append(point)
    return points


def names_of(*exprs: Expr) -> list:
    out = set()
    for e in exprs:
        out |= as_expr(e).free_variables
    return sorted(out)
