"""Residual reports shared by the symbolic checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .expr import Expr, ZeroStatus, render

NUMERIC_TOL = 1e-9


@dataclass(frozen=True)
class ResidualCheck:
    """One equation with its residual and zero-test verdict (plus a sampled maximum)."""

    name: str
    residual: Expr
    status: ZeroStatus
    max_abs: Optional[float] = None
    tol: float = NUMERIC_TOL

    @property
    def passed(self) -> bool:
        if self.status.proven_zero:
            return True
        if self.status.proven_nonzero:
            return False
        return self.max_abs is not None and self.max_abs < self.tol

    @property
    def decided(self) -> bool:
        return not self.status.unknown or self.passed

    @property
    def method(self) -> str:
        if self.status.proven_zero:
            return "symbolic"
        return "numeric"

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "residual": render(self.residual),
            "zero_test": self.status.to_json(),
            "passed": self.passed,
            "method": self.method,
        }
        if self.max_abs is not None:
            out["max_abs"] = self.max_abs
        return out


@dataclass(frozen=True)
class CheckReport:
    kind: str
    checks: tuple
    notes: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def decided(self) -> bool:
        return self.passed or any(c.status.proven_nonzero for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> ResidualCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "notes": list(self.notes),
        }


def residual_check(name: str, residual, domain=(), n_numeric: int = 64, box=None, seed: int = None, tol: float = NUMERIC_TOL) -> ResidualCheck:
    """Zero-test ``residual``; when that is inconclusive, record a sampled maximum."""
    from .expr import SamplerConfig, as_expr, compile_expr, is_zero, normalize
    from .sampling import DEFAULT_BOX, DEFAULT_SEED, names_of, sample_points
    from .errors import EvaluationError

    box = box or DEFAULT_BOX
    seed = DEFAULT_SEED if seed is None else seed
    residual = normalize(as_expr(residual))
    config = SamplerConfig(box=tuple(box), seed=seed, avoid=tuple(domain))
    status = is_zero(residual, config)
    if status.proven_zero:
        return ResidualCheck(name, residual, status, 0.0, tol)
    if status.proven_nonzero:
        return ResidualCheck(name, residual, status, abs(status.value), tol)
    worst = None
    try:
        points = sample_points(names_of(residual, *domain), n_numeric, box, seed, avoid=domain, require=[residual])
        fn = compile_expr(residual)
        worst = max((abs(fn(p)) for p in points), default=0.0)
    except EvaluationError:
        worst = None
    return ResidualCheck(name, residual, status, worst, tol)
