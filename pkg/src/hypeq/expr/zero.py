"""Zero testing: exact on the rational fragment, sampled elsewhere."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..errors import EvaluationError
from .nodes import Expr, as_expr
from .normal import rational_form
from .numeric import compile_expr

PROVEN_ZERO = "ProvenZero"
PROVEN_NONZERO = "ProvenNonZero"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SamplerConfig:
    """Numeric fallback settings.

    ``avoid`` lists expressions whose zero sets are excluded from sampling
    (points with ``|g| < margin`` are redrawn); ``fixed`` pins variables.
    """

    n: int = 64
    box: tuple = (-2.0, 2.0)
    floor: float = 1e-7
    seed: int = 42
    avoid: tuple = ()
    margin: float = 1e-6
    fixed: tuple = ()
    max_attempts: int = 40

    def with_avoid(self, *exprs) -> "SamplerConfig":
        return SamplerConfig(self.n, self.box, self.floor, self.seed, self.avoid + tuple(exprs), self.margin, self.fixed, self.max_attempts)


DEFAULT_SAMPLER = SamplerConfig()


@dataclass(frozen=True)
class ZeroStatus:
    kind: str
    witness: Optional[dict] = None
    value: Optional[float] = None
    samples: tuple = field(default=(), repr=False)
    consistent_with_zero: bool = False
    seed: Optional[int] = None

    @property
    def proven_zero(self) -> bool:
        return self.kind == PROVEN_ZERO

    @property
    def proven_nonzero(self) -> bool:
        return self.kind == PROVEN_NONZERO

    @property
    def unknown(self) -> bool:
        return self.kind == UNKNOWN

    def describe(self) -> str:
        if self.kind == PROVEN_NONZERO:
            pt = ", ".join(f"{k}={v:.6g}" for k, v in sorted(self.witness.items()))
            if not pt:
                return f"{self.kind} (constant {self.value:.6g})"
            return f"{self.kind} (witness {pt} gives {self.value:.6g})"
        if self.kind == UNKNOWN:
            tag = "consistent-with-zero" if self.consistent_with_zero else "no decisive sample"
            return f"{self.kind} ({tag}, {len(self.samples)} samples)"
        return self.kind

    def to_json(self) -> dict:
        out = {"status": self.kind}
        if self.witness is not None:
            out["witness"] = dict(self.witness)
            out["value"] = self.value
        if self.kind == UNKNOWN:
            out["consistent_with_zero"] = self.consistent_with_zero
            out["samples"] = len(self.samples)
        if self.seed is not None:
            out["seed"] = self.seed
        return out


ZERO_STATUS = ZeroStatus(PROVEN_ZERO)


def is_zero(e, config: SamplerConfig = None) -> ZeroStatus:
    """ProvenZero iff the rational normal form vanishes; else sample.

    A sample is decisive when the numerator clears the floor relative to the
    size of its own terms (so cancellation noise in large terms is not taken
    for a nonzero value) and the full quotient clears the floor as well.
    """
    config = config or DEFAULT_SAMPLER
    e = as_expr(e)
    rf = rational_form(e)
    if rf.is_zero:
        return ZERO_STATUS
    gens = [compile_expr(g) for g in rf.gens]
    avoid = [compile_expr(as_expr(a)) for a in config.avoid]
    fixed = dict(config.fixed)
    names = sorted(set().union(*(g.free_variables for g in rf.gens)) | set().union(*(as_expr(a).free_variables for a in config.avoid)) if rf.gens or config.avoid else ())
    free = [n for n in names if n not in fixed]
    rng = random.Random(config.seed)
    lo, hi = config.box
    samples = []
    attempts = 0
    while len(samples) < config.n and attempts < config.n * config.max_attempts:
        attempts += 1
        point = dict(fixed)
        for n in free:
            point[n] = rng.uniform(lo, hi)
        try:
            if any(abs(a(point)) < config.margin for a in avoid):
                continue
            gv = [g(point) for g in gens]
        except EvaluationError:
            continue
        num, scale = _poly_value(rf.num, gv)
        den, _ = _poly_value(rf.den, gv)
        if abs(den) < 1e-12:
            continue
        value = num / den
        samples.append((point, value))
        if abs(num) > config.floor * max(1.0, scale) and abs(value) > config.floor:
            return ZeroStatus(PROVEN_NONZERO, point, value, tuple(samples), False, config.seed)
    consistent = bool(samples) and all(abs(v) <= config.floor * 10 or abs(v) < 1e-6 for _, v in samples)
    return ZeroStatus(UNKNOWN, None, None, tuple(samples), consistent, config.seed)


def _poly_value(terms, gv):
    total = 0.0
    scale = 0.0
    for exps, coeff in terms:
        t = float(coeff)
        for g, k in zip(gv, exps):
            if k:
                t *= g**k
        total += t
        scale += abs(t)
    return total, scale
