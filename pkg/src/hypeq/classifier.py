"""Membership of ``u_xy = f`` in the contact-invariant subclasses.

``H_x``: ``f = F0 + F1*ux`` with ``F0, F1`` free of ``ux`` and
``F1_x + F0*F1_uy = F0_u + F1*F0_uy``; ``H_y`` mirrors it under
``(x, ux) <-> (y, uy)``; ``H_xy`` is the bilinear family
``f = f0 + f1*ux + f2*uy + f3*ux*uy`` with
``f3_y = f1_u``, ``f3_x = f2_u``, ``f2_y = f1_x = f0_u + f1*f2 - f3*f0``.
The label partition is ``Hxy`` (both), ``HxPrime``/``HyPrime`` (exactly one)
and ``C1`` (neither, each failure decisive).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import Indeterminate, NotAffine
from .expr import Expr, SamplerConfig, Var, affine_coefficients, as_expr, diff, is_zero, normalize, render
from .reports import ResidualCheck

HXY = "Hxy"
HX_PRIME = "HxPrime"
HY_PRIME = "HyPrime"
C1 = "C1"
INDETERMINATE = "Indeterminate"
LABELS = (HXY, HX_PRIME, HY_PRIME, C1, INDETERMINATE)

MEMBER = "member"
NOT_MEMBER = "not-member"
NOT_AFFINE = "NotAffine"
UNDECIDED = "Indeterminate"


@dataclass(frozen=True)
class SubclassCheck:
    """Outcome of one membership test with its coefficients and residuals."""

    subclass: str
    outcome: str
    coefficients: dict = field(default_factory=dict)
    residuals: tuple = ()
    note: str = ""

    @property
    def member(self) -> Optional[bool]:
        if self.outcome == MEMBER:
            return True
        if self.outcome in (NOT_MEMBER, NOT_AFFINE):
            return False
        return None

    @property
    def decisive(self) -> bool:
        return self.outcome != UNDECIDED

    def to_json(self) -> dict:
        return {
            "subclass": self.subclass,
            "outcome": self.outcome,
            "coefficients": {k: render(v) for k, v in self.coefficients.items()},
            "residuals": [r.to_json() for r in self.residuals],
            "note": self.note,
        }


def _config(domain, config):
    if config is not None:
        return config.with_avoid(*domain) if domain else config
    return SamplerConfig(avoid=tuple(domain))


def _verdict(subclass, coefficients, named_residuals, config) -> SubclassCheck:
    checks = []
    for name, expr in named_residuals:
        r = normalize(expr)
        st = is_zero(r, config)
        checks.append(ResidualCheck(name, r, st, abs(st.value) if st.proven_nonzero else (0.0 if st.proven_zero else None)))
    if all(c.status.proven_zero for c in checks):
        outcome = MEMBER
    elif any(c.status.proven_nonzero for c in checks):
        outcome = NOT_MEMBER
    else:
        outcome = UNDECIDED
    return SubclassCheck(subclass, outcome, coefficients, tuple(checks))


def _split(subclass, f, vars, config):
    try:
        return affine_coefficients(f, vars, config), None
    except NotAffine as exc:
        return None, SubclassCheck(subclass, NOT_AFFINE, note=str(exc))
    except Indeterminate as exc:
        return None, SubclassCheck(subclass, UNDECIDED, note=str(exc))


def _check_single(f, axis: str, domain, config) -> SubclassCheck:
    # axis "x": split over ux, derivatives in x and uy; axis "y" mirrors
    own, other = ("ux", "uy") if axis == "x" else ("uy", "ux")
    subclass = "H_" + axis
    config = _config(domain, config)
    coeffs, failed = _split(subclass, normalize(as_expr(f)), (own,), config)
    if failed is not None:
        return failed
    F0, F1 = coeffs["F0"], coeffs["F1"]
    residual = diff(F1, axis) + F0 * diff(F1, other) - diff(F0, "u") - F1 * diff(F0, other)
    return _verdict(subclass, coeffs, [(f"F1_{axis} + F0*F1_{other} - F0_u - F1*F0_{other}", residual)], config)


def check_Hx(f, domain=(), config: SamplerConfig = None) -> SubclassCheck:
    """``f = F0 + F1*ux`` and ``F1_x + F0 F1_uy - F0_u - F1 F0_uy = 0``."""
    return _check_single(f, "x", domain, config)


def check_Hy(f, domain=(), config: SamplerConfig = None) -> SubclassCheck:
    """Mirror of :func:`check_Hx` under ``(x, ux) <-> (y, uy)``."""
    return _check_single(f, "y", domain, config)


def check_Hxy(f, domain=(), config: SamplerConfig = None) -> SubclassCheck:
    """Bilinear form with the four compatibility residuals."""
    config = _config(domain, config)
    coeffs, failed = _split("H_xy", normalize(as_expr(f)), ("ux", "uy"), config)
    if failed is not None:
        return failed
    f0, f1, f2, f3 = (coeffs[k] for k in ("f0", "f1", "f2", "f3"))
    residuals = [
        ("f3_y - f1_u", diff(f3, "y") - diff(f1, "u")),
        ("f3_x - f2_u", diff(f3, "x") - diff(f2, "u")),
        ("f2_y - f1_x", diff(f2, "y") - diff(f1, "x")),
        ("f1_x - (f0_u + f1*f2 - f3*f0)", diff(f1, "x") - (diff(f0, "u") + f1 * f2 - f3 * f0)),
    ]
    return _verdict("H_xy", coeffs, residuals, config)


@dataclass(frozen=True)
class ClassificationReport:
    f: Expr
    label: str
    hx: SubclassCheck
    hy: SubclassCheck
    hxy: Optional[SubclassCheck] = None
    trace: tuple = ()

    @property
    def inconclusive(self) -> list:
        out = []
        for check in (self.hx, self.hy):
            if not check.decisive:
                out.append(check.subclass)
        return out

    def to_json(self) -> dict:
        out = {
            "f": render(self.f),
            "label": self.label,
            "H_x": self.hx.to_json(),
            "H_y": self.hy.to_json(),
            "trace": list(self.trace),
        }
        if self.hxy is not None:
            out["H_xy"] = self.hxy.to_json()
        if self.label == INDETERMINATE:
            out["inconclusive"] = self.inconclusive
        return out


def label_from(hx: SubclassCheck, hy: SubclassCheck) -> str:
    if hx.member is None or hy.member is None:
        return INDETERMINATE
    if hx.member and hy.member:
        return HXY
    if hx.member:
        return HX_PRIME
    if hy.member:
        return HY_PRIME
    return C1


def classify(f, domain=(), config: SamplerConfig = None) -> ClassificationReport:
    """Label ``u_xy = f`` as Hxy, HxPrime, HyPrime, C1 or Indeterminate."""
    f = normalize(as_expr(f))
    hx = check_Hx(f, domain, config)
    hy = check_Hy(f, domain, config)
    label = label_from(hx, hy)
    trace = []
    for check in (hx, hy):
        methods = sorted({"symbolic" if r.status.proven_zero else "numeric" for r in check.residuals})
        trace.append(f"{check.subclass}: {check.outcome}" + (f" ({', '.join(methods)})" if methods else ""))
    hxy = None
    if label == HXY:
        hxy = check_Hxy(f, domain, config)
        trace.append(f"H_xy cross-check: {hxy.outcome}")
    return ClassificationReport(f, label, hx, hy, hxy, tuple(trace))


_SWAP_LABEL = {HXY: HXY, HX_PRIME: HY_PRIME, HY_PRIME: HX_PRIME, C1: C1, INDETERMINATE: INDETERMINATE}


def swapped_label(label: str) -> str:
    """The label of the equation with ``(x, ux)`` and ``(y, uy)`` exchanged."""
    return _SWAP_LABEL[label]
