"""Named equations, transformation template families and worked examples."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .classifier import C1, HX_PRIME, HXY, HY_PRIME
from .errors import UnknownName
from .expr import Const, Expr, Func, Var, normalize, parse, render
from .transforms import AdmissibleTransformation, ContactTransform, PointEquivalenceTransform


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    f: Expr
    label: str
    darboux: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "f": render(self.f),
            "label": self.label,
            "darboux": {k: render(v) for k, v in self.darboux.items()},
            "note": self.note,
        }


def _entry(name, f, label, note, **darboux):
    return CatalogEntry(name, normalize(parse(f)), label, {k: parse(v) for k, v in darboux.items()}, note)


_ENTRIES = (
    _entry("wave", "0", HXY, "linear wave equation in light-cone coordinates", theta="u", h="ux", g="uy"),
    _entry("log-wave", "ux*uy", HXY, "reduces to the wave equation by u~ = exp(u)", theta="exp(u)"),
    _entry("liouville", "exp(u)", C1, "Liouville equation; Darboux integrable at second order only"),
    _entry("sine-gordon", "sin(u)", C1, "sine-Gordon equation; integrable but not Darboux integrable"),
    _entry("klein-gordon", "u", C1, "linear Klein-Gordon equation"),
    _entry("tzitzeica", "exp(u) - exp(-2*u)", C1, "Tzitzeica equation"),
    _entry("quasilinear-x", "ux^2", HY_PRIME, "first integral h = -1/ux - y along y", h="-1/ux - y"),
    _entry("quasilinear-y", "uy^2", HX_PRIME, "first integral g = -1/uy - x along x", g="-1/uy - x"),
)
ENTRIES = {e.name: e for e in _ENTRIES}


def names() -> list:
    return [e.name for e in _ENTRIES]


def get(name: str) -> CatalogEntry:
    try:
        return ENTRIES[name]
    except KeyError:
        raise UnknownName(f"no catalog entry {name!r}; known: {', '.join(names())}") from None


def entries() -> list:
    return list(_ENTRIES)


# ---------------------------------------------------------------- point transformation templates

_GRID = tuple(Fraction(k, 4) for k in range(2, 9))  # 1/2 .. 2


def _param(rng, signed=True) -> Fraction:
    p = rng.choice(_GRID)
    return -p if signed and rng.random() < 0.5 else p


def _c(q: Fraction) -> Expr:
    return Const(q)


def _axis_family(rng, v: str):
    """``a v + b``, ``exp(a v)`` or ``a v / (c v + 3)``, each invertible in closed form."""
    t = Var(v)
    kind = rng.randrange(3)
    a, b = _param(rng), _param(rng)
    if kind == 0:
        return _c(a) * t + _c(b), "affine"
    if kind == 1:
        return _fexp(_c(a) * t), "exp"
    c = _param(rng, signed=False)
    return _c(a) * t / (_c(c) * t + 3), "mobius"


def _fexp(e):
    return Func("exp", e)


def _u_family(rng):
    x, y, u = Var("x"), Var("y"), Var("u")
    kind = rng.randrange(4)
    a, b, c, d = (_param(rng) for _ in range(4))
    if kind == 0:
        return _c(a) * u + _c(b) + _c(c) * x * y + _c(d) * x * x, "linear+poly"
    if kind == 1:
        return _fexp(_c(a) * u), "exp"
    if kind == 2:
        return u * _fexp(_c(a) * x + _c(b) * y), "u*exp"
    return _c(a) * u + _c(b) * x + _c(c) * y, "linear"


def point_transform_templates(seed: int = 42, n: int = 10, swap_rate: float = 0.0) -> list:
    """Seeded draws of invertible point transformations.

    Parameters come from ``{±1/2, ±3/4, ..., ±2}`` so ``X_x Y_y U_u`` stays
    away from zero on ``[-1, 1]^3``; with ``swap_rate > 0`` a fraction of the
    draws is followed by the swap of ``(x, ux)`` and ``(y, uy)``.
    """
    rng = random.Random(seed)
    out = []
    for i in range(n):
        X, xd = _axis_family(rng, "x")
        Y, yd = _axis_family(rng, "y")
        U, ud = _u_family(rng)
        swap = swap_rate > 0 and rng.random() < swap_rate
        out.append(PointEquivalenceTransform(normalize(X), normalize(Y), normalize(U), swap, name=f"template-{seed}-{i} ({xd}, {yd}, {ud})"))
    return out


# ---------------------------------------------------------------- Darboux templates

THETA_TEMPLATES = (
    "u",
    "exp(u)",
    "x*u",
    "u + x*y",
    "exp(x + u)",
    "y*exp(u)",
    "u*exp(x)",
    "2*u + x^2*y",
    "exp(2*u)",
    "u*(1 + x^2)",
    "x*u + y^2",
    "exp(u + y) + x",
    "(x + 2)*u",
    "u^3",
    "sin(x) + u",
    "u + sin(x)*cos(y)",
    "(1 + x^2)*exp(u)",
    "exp(-u) + x",
    "x*y + u*exp(y)",
    "u/(x + 2)",
)
"""Theta data whose displayed-sign image also lies in the bilinear subclass.

``u*exp(x + y)`` is the standing counterexample: its displayed-sign image
``u + ux + uy`` is outside the subclass (see :func:`hypeq.darboux.f_from_theta`).
"""

GAUGE_TEMPLATES = (
    "2*eta",
    "eta + x^2",
    "exp(eta)",
    "-eta",
    "eta^3 + eta",
    "x*eta",
    "eta + sin(x)",
    "(1 + x^2)*eta",
    "exp(x)*eta",
    "eta/(x^2 + 1) + x",
)
"""Gauge functions ``H(x, eta)`` with ``H_eta != 0`` away from ``x = 0``."""

H_DATA = ("ux", "-1/ux - y", "ux - u")


# ---------------------------------------------------------------- worked examples


def legendre() -> ContactTransform:
    """Partial Legendre transformation in ``(x, ux)``; an involution up to sign."""
    t = ContactTransform.from_strings("ux", "y", "u - x*ux", "-x", "uy", name="partial-legendre")
    inv = ContactTransform.from_strings("-ux", "y", "u - x*ux", "x", "uy", name="partial-legendre^-1")
    return t.with_inverse(inv)


def tampered_legendre() -> ContactTransform:
    """Partial Legendre with the sign of ``Ux`` flipped; violates the contact condition."""
    return ContactTransform.from_strings("ux", "y", "u - x*ux", "x", "uy", name="tampered-legendre")


def double_legendre() -> ContactTransform:
    return ContactTransform.from_strings("ux", "uy", "u - x*ux - y*uy", "-x", "-y", name="double-legendre")


def legendre_wave() -> AdmissibleTransformation:
    """``(f = 0, partial Legendre, f~ = 0)``."""
    return AdmissibleTransformation(Const(0), legendre(), Const(0), Const(0))


def mismatched_pair() -> AdmissibleTransformation:
    """``(f = ux^2, partial Legendre, f~ = 0)``: deliberately not admissible."""
    return AdmissibleTransformation(parse("ux^2"), legendre(), Const(0), Const(0))


WORKED_HY = {
    "h": "-1/ux - y",
    "Upsilon": "ups + tau/(eta + xi)",
    "Hfun": "-1/(eta + xi)",
    "inverse": {"X": "-ux*(x + y)^2", "Y": "y", "U": "u + ux*(x + y)", "Ux": "-1/(x + y)", "Uy": "uy - ux"},
}


def worked_Hy_inverse() -> ContactTransform:
    return ContactTransform.from_strings(*(WORKED_HY["inverse"][c] for c in ("X", "Y", "U", "Ux", "Uy")), name="worked-Hy^-1")


def worked_Hy(box=None, seed: Optional[int] = None) -> AdmissibleTransformation:
    """Genuine contact transformation over ``u_xy = ux^2`` with target ``-2 ux~/(x~ + y~)``."""
    from .darboux import build_Hy_admissible

    T = build_Hy_admissible(WORKED_HY["h"], parse(WORKED_HY["Upsilon"]), parse(WORKED_HY["Hfun"]), worked_Hy_inverse(), box, seed)
    object.__setattr__(T.transform, "name", "worked-Hy")
    return T


def to_json() -> dict:
    return {
        "equations": [e.to_json() for e in _ENTRIES],
        "theta_templates": list(THETA_TEMPLATES),
        "gauge_templates": list(GAUGE_TEMPLATES),
        "h_data": list(H_DATA),
        "worked": {
            "partial-legendre": legendre().to_json(),
            "tampered-legendre": tampered_legendre().to_json(),
            "double-legendre": double_legendre().to_json(),
            "worked-Hy": WORKED_HY,
        },
    }
