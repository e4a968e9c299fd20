"""Numeric ground truth for admissibility.

Second-order prolongation is computed from first principles: the chain rule
``D_x Ux = Uxx D_x X + Uxy D_x Y`` (and its three siblings) is solved as two
2x2 linear systems at a sampled jet.  Total derivatives of the components are
taken by the complex-step method on compiled expressions, so the oracle shares
no code with symbolic differentiation and has no subtractive cancellation.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import ContactInconsistency, EvaluationError, PoleEncountered, SingularPushforward
from .expr import Expr, as_expr, compile_expr, normalize, render
from .jets import JET2, JetPoint2
from .sampling import DEFAULT_BOX, DEFAULT_SEED
from .transforms import COMPONENTS, AdmissibleTransformation, ContactTransform

DET_FLOOR = 1e-10
CONSISTENCY_TOL = 1e-9
COMPLEX_STEP = 1e-20
FD_STEP = 1e-3
MAX_RETRIES = 100


def sample_on_equation(f, n: int, box=DEFAULT_BOX, seed: int = DEFAULT_SEED, domain=(), require=(), margin: float = 1e-6) -> list:
    """``n`` jets uniform in ``box`` with ``uxy = f`` imposed.

    Jets where ``f`` or a ``require`` expression cannot be evaluated, or where
    a ``domain`` expression is within ``margin`` of zero, are redrawn; after
    ``n * MAX_RETRIES`` draws a :class:`PoleEncountered` is raised.
    """
    fc = compile_expr(normalize(as_expr(f)))
    dom = [compile_expr(as_expr(d)) for d in domain]
    req = [compile_expr(as_expr(r)) for r in require]
    lo, hi = box
    rng = random.Random(seed)
    jets = []
    draws = 0
    while len(jets) < n:
        draws += 1
        if draws > max(1, n) * MAX_RETRIES:
            raise PoleEncountered(f"only {len(jets)} of {n} on-equation jets could be drawn in box {box}")
        p = {k: rng.uniform(lo, hi) for k in ("x", "y", "u", "ux", "uy", "uxx", "uyy")}
        try:
            if any(abs(d(p)) < margin for d in dom):
                continue
            for r in req:
                r(p)
            p["uxy"] = fc(p)
        except EvaluationError:
            continue
        jets.append(JetPoint2(**{k: p[k] for k in JET2}, on_equation=True))
    return jets


@dataclass(frozen=True)
class Prolongation2:
    first: dict  # tx, ty, tu, tux, tuy
    uxx: float
    uxy: float
    uyy: float
    uxy_alt: float

    def to_json(self) -> dict:
        return {**self.first, "tuxx": self.uxx, "tuxy": self.uxy, "tuyy": self.uyy}


class _Components:
    """Values and total derivatives of a transform's components at jets."""

    def __init__(self, phi: ContactTransform):
        self.phi = phi
        self.numeric = phi.numeric or {}
        self.real = {c: compile_expr(getattr(phi, c)) for c in COMPONENTS if c not in self.numeric}
        self.cplx = {c: compile_expr(getattr(phi, c), "complex") for c in COMPONENTS if c not in self.numeric}

    def value(self, c, p):
        if c in self.numeric:
            return self.numeric[c](p)
        return self.real[c](p)

    def total(self, c, j: JetPoint2, axis: str) -> float:
        if axis == "x":
            direction = {"x": 1.0, "y": 0.0, "u": j.ux, "ux": j.uxx, "uy": j.uxy}
        else:
            direction = {"x": 0.0, "y": 1.0, "u": j.uy, "ux": j.uxy, "uy": j.uyy}
        base = j.first()
        if c not in self.numeric:
            h = COMPLEX_STEP
            p = {k: complex(base[k], h * direction[k]) for k in base}
            return self.cplx[c](p).imag / h
        # fourth-order central difference for quadrature-backed components
        h = FD_STEP
        vals = []
        for s in (-2, -1, 1, 2):
            vals.append(self.numeric[c]({k: base[k] + s * h * direction[k] for k in base}))
        return (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)


def _solve2(a11, a12, a21, a22, b1, b2):
    det = a11 * a22 - a12 * a21
    if abs(det) < DET_FLOOR:
        raise SingularPushforward(f"pushforward determinant {det:.3e} below {DET_FLOOR}")
    return (b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det


def prolong2_numeric(phi: ContactTransform, j: JetPoint2, _components: _Components = None) -> Prolongation2:
    """Image second jet of ``j`` under the second prolongation of ``phi``."""
    comp = _components or _Components(phi)
    p = j.first()
    first = {t: comp.value(c, p) for t, c in zip(("tx", "ty", "tu", "tux", "tuy"), COMPONENTS)}
    DxX, DyX = comp.total("X", j, "x"), comp.total("X", j, "y")
    DxY, DyY = comp.total("Y", j, "x"), comp.total("Y", j, "y")
    DxUx, DyUx = comp.total("Ux", j, "x"), comp.total("Ux", j, "y")
    DxUy, DyUy = comp.total("Uy", j, "x"), comp.total("Uy", j, "y")
    # rows: D_x and D_y of a first-order component; unknowns (second-order, mixed)
    uxx, uxy1 = _solve2(DxX, DxY, DyX, DyY, DxUx, DyUx)
    uxy2, uyy = _solve2(DxX, DxY, DyX, DyY, DxUy, DyUy)
    scale = max(1.0, abs(uxy1), abs(uxy2))
    if abs(uxy1 - uxy2) > CONSISTENCY_TOL * scale:
        raise ContactInconsistency(f"mixed second derivative disagrees: {uxy1!r} vs {uxy2!r}")
    return Prolongation2(first, uxx, uxy1, uyy, uxy2)


@dataclass
class VerificationReport:
    samples: int
    max_abs: float
    mean_abs: float
    tol: float
    seed: int
    passed: bool
    aborted: int = 0
    witnesses: list = field(default_factory=list)
    mode: str = "explicit"
    box: tuple = DEFAULT_BOX

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "max_abs_residual": self.max_abs,
            "mean_abs_residual": self.mean_abs,
            "tol": self.tol,
            "seed": self.seed,
            "box": list(self.box),
            "mode": self.mode,
            "aborted": self.aborted,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }


def _residuals(phi, target, pullback, jets):
    comp = _Components(phi)
    tc = compile_expr(target) if target is not None else None
    pc = compile_expr(pullback) if target is None else None
    out = []
    for j in jets:
        try:
            pro = prolong2_numeric(phi, j, comp)
            if tc is not None:
                expected = tc(pro.first)
            else:
                expected = pc(j.first())
            out.append((abs(pro.uxy - expected), None))
        except EvaluationError as exc:
            out.append((None, f"{type(exc).__name__}: {exc}"))
    return out


def _worker(args):
    phi, target, pullback, jets = args
    return _residuals(phi, target, pullback, jets)


def check_admissible_numeric(
    T: AdmissibleTransformation,
    n: int = 1000,
    box=DEFAULT_BOX,
    tol: float = 1e-9,
    seed: int = DEFAULT_SEED,
    jobs: Optional[int] = None,
    mode: str = "auto",
) -> VerificationReport:
    """Push ``n`` on-equation jets through the second prolongation and compare.

    ``mode="explicit"`` compares with the target in tilde variables at the
    image jet, ``"implicit"`` with the pullback at the source jet; ``"auto"``
    uses the explicit target when one is known.
    """
    phi = T.transform
    explicit = T.target is not None if mode == "auto" else mode == "explicit"
    target = normalize(T.target) if explicit else None
    pullback = normalize(T.target_pullback)
    require = [] if phi.numeric else [getattr(phi, c) for c in COMPONENTS]
    jets = sample_on_equation(T.source, n, box, seed, domain=phi.domain, require=require)
    if jobs and jobs > 1 and not phi.numeric and n > 1:
        size = math.ceil(n / jobs)
        chunks = [jets[i : i + size] for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_worker, [(phi, target, pullback, c) for c in chunks]))
        results = [r for part in parts for r in part]
    else:
        results = _residuals(phi, target, pullback, jets)
    values = [r for r, _ in results if r is not None]
    aborted = [(i, err) for i, (_, err) in enumerate(results) if err is not None]
    max_abs = max(values, default=math.inf)
    mean_abs = sum(values) / len(values) if values else math.inf
    witnesses = []
    order = sorted(range(len(results)), key=lambda i: -(results[i][0] if results[i][0] is not None else math.inf))
    for i in order:
        r, err = results[i]
        if err is None and r < tol:
            break
        entry = {"index": i, "jet": jets[i].as_dict()}
        entry["residual" if err is None else "error"] = r if err is None else err
        witnesses.append(entry)
        if len(witnesses) >= 5:
            break
    passed = not aborted and max_abs < tol
    return VerificationReport(
        n, max_abs, mean_abs, tol, seed, passed, len(aborted), witnesses, "explicit" if explicit else "implicit", tuple(box)
    )
