"""Trivially Darboux-integrable equations and their admissible transformations.

An equation of the class can be written as ``D_y h = 0`` with
``h = h(x, y, u, ux)``, as ``D_x g = 0`` with ``g = g(x, y, u, uy)``, or as
``D_x D_y theta = 0`` with ``theta = theta(x, y, u)``; the last form is a point
transformation ``u~ = theta`` away from the wave equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .classifier import MEMBER, check_Hxy
from .errors import (
    BranchUndetermined,
    ContactConditionViolated,
    DegenerateDatum,
    DivisionByZero,
    EvaluationError,
    Indeterminate,
    IntegrationFailure,
    NotInHxy,
)
from .expr import (
    ZERO,
    Const,
    Expr,
    Func,
    SamplerConfig,
    Var,
    adaptive_simpson,
    antiderivative,
    as_expr,
    compile_expr,
    definite,
    diff,
    is_zero,
    normalize,
    parse,
    render,
    replace,
    substitute,
)
from .jets import swap_xy, truncated_total_derivative
from .reports import CheckReport, residual_check
from .transforms import (
    COMPONENTS,
    SOURCE,
    AdmissibleTransformation,
    ContactTransform,
    PointEquivalenceTransform,
    check_contact_condition,
    jacobian_nondegenerate,
    pullback_target_point,
    target_from_inverse,
)

KINDS = {"g": "uy", "h": "ux", "theta": "u"}
_ALLOWED = {
    "g": {"x", "y", "u", "uy"},
    "h": {"x", "y", "u", "ux"},
    "theta": {"x", "y", "u"},
}


@dataclass(frozen=True)
class DarbouxDatum:
    """``g(x,y,u,uy)``, ``h(x,y,u,ux)`` or ``theta(x,y,u)`` with its nondegeneracy."""

    kind: str
    expr: Expr
    domain: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Darboux datum kind must be one of {sorted(KINDS)}, not {self.kind!r}")
        object.__setattr__(self, "expr", normalize(as_expr(self.expr)))
        extra = self.expr.free_variables - _ALLOWED[self.kind]
        if extra:
            raise ValueError(f"{self.kind} may depend only on {sorted(_ALLOWED[self.kind])}, found {sorted(extra)}")
        object.__setattr__(self, "domain", tuple(as_expr(d) for d in self.domain))

    @classmethod
    def parse(cls, kind: str, text: str, domain=()) -> "DarbouxDatum":
        from .transforms import parse_domain

        return cls(kind, parse(text), parse_domain(domain))

    @property
    def nondegeneracy_expr(self) -> Expr:
        return normalize(diff(self.expr, KINDS[self.kind]))

    def nondegeneracy(self):
        return is_zero(self.nondegeneracy_expr, SamplerConfig(avoid=self.domain))

    def require_nondegenerate(self) -> Expr:
        d = self.nondegeneracy_expr
        if d == ZERO or self.nondegeneracy().proven_zero:
            raise DegenerateDatum(f"{self.kind}_{KINDS[self.kind]} vanishes identically for {self.kind} = {render(self.expr)}")
        return d

    def to_json(self) -> dict:
        return {"kind": self.kind, "expr": render(self.expr), "domain": [render(d) for d in self.domain]}


def _datum(value, kind) -> DarbouxDatum:
    if isinstance(value, DarbouxDatum):
        if value.kind != kind:
            raise ValueError(f"expected a {kind} datum, got {value.kind}")
        return value
    return DarbouxDatum(kind, as_expr(value))


def f_from_h(h) -> Expr:
    """``D_y h = h_y + h_u uy + h_ux uxy = 0`` solved for ``uxy``."""
    h = _datum(h, "h")
    hux = h.require_nondegenerate()
    e = h.expr
    return normalize(-(diff(e, "y") + diff(e, "u") * Var("uy")) / hux)


def f_from_g(g) -> Expr:
    """``D_x g = g_x + g_u ux + g_uy uxy = 0`` solved for ``uxy``."""
    g = _datum(g, "g")
    guy = g.require_nondegenerate()
    e = g.expr
    return normalize(-(diff(e, "x") + diff(e, "u") * Var("ux")) / guy)


DISPLAYED = "displayed"
EQUATION = "equation"
CONVENTIONS = (DISPLAYED, EQUATION)


def _sign(convention) -> int:
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, not {convention!r}")
    return 1 if convention == DISPLAYED else -1


def f_from_theta(theta, convention: str = DISPLAYED) -> Expr:
    """``(theta_xy + theta_xu uy + theta_yu ux + theta_uu ux uy) / theta_u``.

    Expanding ``D_x D_y theta = 0`` gives the same quotient with the opposite
    sign; ``convention="equation"`` returns that one.  The two conventions
    differ by ``f -> -f``, and the bilinear subclass is not invariant under
    this sign change, so only the ``"equation"`` images are guaranteed to
    satisfy the bilinear compatibility conditions.
    """
    sign = _sign(convention)
    theta = _datum(theta, "theta")
    tu = theta.require_nondegenerate()
    t = theta.expr
    ux, uy = Var("ux"), Var("uy")
    num = diff(t, "x", "y") + diff(t, "x", "u") * uy + diff(t, "y", "u") * ux + diff(t, "u", "u") * ux * uy
    return normalize(sign * num / tu)


def gauge_h(h, H) -> DarbouxDatum:
    """``h~ = H(x, h)`` with ``H`` written in ``x`` and ``eta`` (the slot for ``h``)."""
    h = _datum(h, "h")
    H = as_expr(H)
    extra = H.free_variables - {"x", "eta"}
    if extra:
        raise ValueError(f"gauge function may depend only on x and eta, found {sorted(extra)}")
    Hh = normalize(substitute(diff(H, "eta"), {"eta": h.expr}))
    if Hh == ZERO or is_zero(Hh, SamplerConfig(avoid=h.domain)).proven_zero:
        raise DegenerateDatum(f"H_h vanishes for H = {render(H)}")
    return DarbouxDatum("h", substitute(H, {"eta": h.expr}), h.domain)


def gauge_g(g, G) -> DarbouxDatum:
    """``g~ = G(y, g)`` with ``G`` written in ``y`` and ``eta``."""
    g = _datum(g, "g")
    G = as_expr(G)
    extra = G.free_variables - {"y", "eta"}
    if extra:
        raise ValueError(f"gauge function may depend only on y and eta, found {sorted(extra)}")
    Gg = normalize(substitute(diff(G, "eta"), {"eta": g.expr}))
    if Gg == ZERO or is_zero(Gg, SamplerConfig(avoid=g.domain)).proven_zero:
        raise DegenerateDatum(f"G_g vanishes for G = {render(G)}")
    return DarbouxDatum("g", substitute(G, {"eta": g.expr}), g.domain)


# ---------------------------------------------------------------- reduction to the wave equation

BASE_CANDIDATES = (0, 1, -1, 2, -2, Const(1) / 2)


@dataclass
class ThetaReconstruction:
    f: Expr
    theta: Expr
    w: Expr
    phi: Expr
    base_point: tuple
    verification: object

    @property
    def verified(self) -> bool:
        return self.verification.proven_zero

    def to_json(self) -> dict:
        return {
            "f": render(self.f),
            "theta": render(self.theta),
            "w": render(self.w),
            "phi": render(self.phi),
            "base_point": [render(as_expr(c)) for c in self.base_point],
            "verified": self.verified,
            "check": self.verification.to_json(),
        }


class NumericTheta:
    """Quadrature evaluator for ``theta`` when the table cannot integrate.

    ``w`` is the line integral of ``(f2, f1, f3)`` from the base point and
    ``theta(x,y,u) = int_{u0}^u e^w dr + int_{x0}^x int_{y0}^y f0 e^w (s,t,u0) dt ds``.
    """

    def __init__(self, coefficients: dict, base=(0.0, 0.0, 0.0), tol: float = 1e-10):
        self.c = {k: compile_expr(normalize(v)) for k, v in coefficients.items()}
        self.base = tuple(float(b) for b in base)
        self.tol = tol

    def w(self, x, y, u):
        x0, y0, u0 = self.base
        f1, f2, f3 = self.c["f1"], self.c["f2"], self.c["f3"]
        q = adaptive_simpson
        part1 = q(lambda s: f2({"x": s, "y": y0, "u": u0}), x0, x, self.tol)
        part2 = q(lambda t: f1({"x": x, "y": t, "u": u0}), y0, y, self.tol)
        part3 = q(lambda r: f3({"x": x, "y": y, "u": r}), u0, u, self.tol)
        return part1 + part2 + part3

    def __call__(self, point) -> float:
        x, y, u = (float(point[k]) for k in ("x", "y", "u"))
        x0, y0, u0 = self.base
        f0 = self.c["f0"]
        q = adaptive_simpson
        head = q(lambda r: math.exp(self.w(x, y, r)), u0, u, self.tol)
        tail = q(lambda s: q(lambda t: f0({"x": s, "y": t, "u": u0}) * math.exp(self.w(s, t, u0)), y0, y, self.tol), x0, x, self.tol)
        return head + tail


def _try_base(f0, f1, f2, f3, base):
    x0, y0, u0 = (as_expr(b) for b in base)
    x, y, u = Var("x"), Var("y"), Var("u")
    w = normalize(
        definite(substitute(f2, {"y": y0, "u": u0}), "x", x0, x)
        + definite(substitute(f1, {"u": u0}), "y", y0, y)
        + definite(f3, "u", u0, u)
    )
    E = normalize(Func("exp", w))
    theta1 = antiderivative(E, "u")
    R = normalize(f0 * E - diff(theta1, "x", "y"))
    if "u" in R.free_variables:
        st = is_zero(normalize(diff(R, "u")))
        if st.proven_nonzero:
            raise IntegrationFailure(f"phi_xy = {render(R)} depends on u; the coefficients are not compatible")
        R = substitute(R, {"u": u0})
    phi = normalize(definite(definite(R, "y", y0, y), "x", x0, x))
    return w, normalize(theta1 + phi), phi


def reconstruct_theta(f, base=None, domain=(), convention: str = DISPLAYED) -> ThetaReconstruction:
    """``theta`` with ``f_from_theta(theta, convention) = f``.

    With ``f`` written as ``f0 + f1 ux + f2 uy + f3 ux uy`` in the displayed
    sign, ``w`` solves ``w_x = f2``, ``w_y = f1``, ``w_u = f3``; then
    ``theta_u = e^w`` and the ``u``-free remainder ``phi`` solves
    ``phi_xy = f0 e^w - theta1_xy``.  Solvability is exactly membership of
    ``f`` (``"equation"``) or of ``-f`` (``"displayed"``) in the bilinear subclass.
    """
    sign = _sign(convention)
    f = normalize(as_expr(f))
    g = normalize(sign * -f)
    check = check_Hxy(g, domain)
    if check.outcome != MEMBER:
        if check.decisive:
            msg = f"{render(f)} is not in the image of the theta formula: {render(g)} is not in the bilinear subclass ({check.outcome})"
            if sign == 1 and check_Hxy(f, domain).outcome == MEMBER:
                msg += "; f itself is in the subclass, so convention='equation' reconstructs it"
            raise NotInHxy(msg, check)
        raise Indeterminate(f"cannot decide membership of {render(g)} in the bilinear subclass", {"H_xy": check})
    c = {k: normalize(-v) for k, v in check.coefficients.items()}
    candidates = [tuple(base)] if base is not None else [(b, b, b) for b in BASE_CANDIDATES]
    last = None
    for cand in candidates:
        try:
            w, theta, phi = _try_base(c["f0"], c["f1"], c["f2"], c["f3"], cand)
        except IntegrationFailure as exc:
            exc.numeric = NumericTheta(c, tuple(float(as_expr(b).value) for b in cand))
            raise
        except (DivisionByZero, EvaluationError) as exc:
            last = exc
            continue
        residual = normalize(f_from_theta(theta, convention) - f)
        status = is_zero(residual, SamplerConfig(avoid=tuple(domain)))
        return ThetaReconstruction(f, theta, w, phi, cand, status)
    raise IntegrationFailure(f"no admissible base point for the line integral of w: {last}", NumericTheta(c))


# ---------------------------------------------------------------- induced target and determining system


def _status(e, domain, config=None):
    return is_zero(normalize(e), config or SamplerConfig(avoid=tuple(domain)))


def induced_target(phi: ContactTransform, f, details: bool = False, config: SamplerConfig = None):
    """Target arbitrary element composed with ``phi``, in source variables.

    Genuine contact branches read it off the determining equations
    (``Uy_ux = F X_ux`` and the mirrored forms); point-type transforms use the
    point-equivalence formula.  ``details=True`` also returns the branch name
    and the cross-check residual.
    """
    f = normalize(as_expr(f))
    X, Y, U, Ux, Uy = (phi.X, phi.Y, phi.U, phi.Ux, phi.Uy)
    dom = phi.domain
    branches = (
        ("X_ux", diff(X, "ux"), Uy, "ux", ("Ux", "uy", Y)),
        ("Y_uy", diff(Y, "uy"), Ux, "uy", ("Uy", "ux", X)),
        ("X_uy", diff(X, "uy"), Uy, "uy", ("Ux", "ux", Y)),
        ("Y_ux", diff(Y, "ux"), Ux, "ux", ("Uy", "uy", X)),
    )
    undecided = []
    for name, d, comp, var, (other_name, other_var, other) in branches:
        d = normalize(d)
        if d == ZERO:
            continue
        st = _status(d, dom, config)
        if st.proven_zero:
            continue
        if st.unknown:
            undecided.append(name)
            continue
        F = normalize(diff(comp, var) / d)
        other_comp = Ux if other_name == "Ux" else Uy
        cross = normalize(diff(other_comp, other_var) - F * diff(other, other_var))
        if details:
            return F, name, residual_check(f"cross-check {other_name}_{other_var} - F*{'Y' if other is Y else 'X'}_{other_var}", cross, dom)
        return F
    if undecided:
        raise BranchUndetermined(f"cannot decide whether {', '.join(undecided)} vanish")
    F = _point_branch(phi, f, config)
    if details:
        return F, "point", None
    return F


def _point_branch(phi, f, config):
    X, Y, U = normalize(phi.X), normalize(phi.Y), normalize(phi.U)
    if X.free_variables <= {"x"} and Y.free_variables <= {"y"} and U.free_variables <= {"x", "y", "u"}:
        return pullback_target_point(PointEquivalenceTransform(X, Y, U), f)
    if X.free_variables <= {"y"} and Y.free_variables <= {"x"} and U.free_variables <= {"x", "y", "u"}:
        # the target swap leaves u~_x~y~ unchanged
        return pullback_target_point(PointEquivalenceTransform(Y, X, U), f)
    raise BranchUndetermined("point-type transform is not of the form X(x), Y(y), U(x,y,u) up to the swap")


def determining_residuals(phi: ContactTransform, f, F) -> list:
    """The eight determining equations with ``F`` the target composed with ``phi``."""
    X, Y, U, Ux, Uy = (phi.X, phi.Y, phi.U, phi.Ux, phi.Uy)
    f, F = as_expr(f), as_expr(F)
    Dx = lambda e: truncated_total_derivative(e, "x")  # noqa: E731
    Dy = lambda e: truncated_total_derivative(e, "y")  # noqa: E731
    return [
        ("a1: D^y X + f X_ux", Dy(X) + f * diff(X, "ux")),
        ("a2: X_uy", diff(X, "uy")),
        ("a3: Ux_uy - F Y_uy", diff(Ux, "uy") - F * diff(Y, "uy")),
        ("a4: D^y Ux + f Ux_ux - F D^y Y", Dy(Ux) + f * diff(Ux, "ux") - F * Dy(Y)),
        ("b1: D^x Y + f Y_uy", Dx(Y) + f * diff(Y, "uy")),
        ("b2: Y_ux", diff(Y, "ux")),
        ("b3: Uy_ux - F X_ux", diff(Uy, "ux") - F * diff(X, "ux")),
        ("b4: D^x Uy + f Uy_uy - F D^x X", Dx(Uy) + f * diff(Uy, "uy") - F * Dx(X)),
    ]


def _swap_source(phi: ContactTransform) -> ContactTransform:
    return ContactTransform(*(swap_xy(getattr(phi, c)) for c in COMPONENTS), domain=tuple(swap_xy(d) for d in phi.domain))


def verify_determining_system(T: AdmissibleTransformation, box=None, seed: int = None) -> CheckReport:
    """All eight determining equations plus the four contact equations.

    The system is tried as given and, failing that, after exchanging
    ``(x, ux)`` and ``(y, uy)`` in the source variables.
    """
    from .transforms import contact_residuals

    phi = T.transform
    contact = [(f"contact {k}", r) for k, r in contact_residuals(phi).items()]

    def run(p, f, F, note):
        checks = [residual_check(n, r, p.domain, 64, box, seed) for n, r in determining_residuals(p, f, F)]
        checks += [residual_check(n, r, phi.domain, 64, box, seed) for n, r in contact]
        return CheckReport("determining", tuple(checks), (note,))

    direct = run(phi, T.source, T.target_pullback, "source variables as given")
    if direct.passed:
        return direct
    swapped = run(_swap_source(phi), swap_xy(T.source), swap_xy(T.target_pullback), "after exchanging (x, ux) and (y, uy) in the source")
    if swapped.passed:
        return swapped
    return direct


# ---------------------------------------------------------------- genuine contact transformations over H_y


AUX = {"tau": "x", "xi": "y", "ups": "u"}


def build_Hy_admissible(h, Upsilon, Hfun, inverse: Optional[ContactTransform] = None, box=None, seed: int = None) -> AdmissibleTransformation:
    """Genuine contact admissible transformation built from a Darboux datum ``h``.

    ``Upsilon`` and ``Hfun`` are expressions in ``(tau, xi, ups, eta)``;
    ``Hfun`` must invert ``h`` in ``ux`` (``h(tau, xi, ups, Hfun) = eta``) and
    ``Upsilon`` must satisfy ``Upsilon_ups != 0`` and the contact compatibility
    ``Upsilon_tau + Hfun * Upsilon_ups = 0``.
    """
    h = _datum(h, "h")
    h.require_nondegenerate()
    Ups = normalize(as_expr(Upsilon))
    Hf = normalize(as_expr(Hfun))
    for name, e in (("Upsilon", Ups), ("Hfun", Hf)):
        extra = e.free_variables - {"tau", "xi", "ups", "eta"}
        if extra:
            raise ValueError(f"{name} may depend only on tau, xi, ups, eta; found {sorted(extra)}")
    Ups_ups = normalize(diff(Ups, "ups"))
    if Ups_ups == ZERO or is_zero(Ups_ups).proven_zero:
        raise DegenerateDatum("Upsilon_ups vanishes identically")
    inverse_residual = normalize(substitute(h.expr, {"x": Var("tau"), "y": Var("xi"), "u": Var("ups"), "ux": Hf}) - Var("eta"))
    st = is_zero(inverse_residual)
    if not st.proven_zero:
        raise DegenerateDatum(f"Hfun does not invert h in ux: h(tau, xi, ups, Hfun) - eta = {render(inverse_residual)} ({st.describe()})")
    compat = normalize(diff(Ups, "tau") + Hf * Ups_ups)
    st = is_zero(compat)
    if not st.proven_zero:
        raise ContactConditionViolated(f"Upsilon_tau + Hfun*Upsilon_ups = {render(compat)} does not vanish ({st.describe()})")
    psi = {k: Var(v) for k, v in AUX.items()}
    psi["eta"] = h.expr
    pull = lambda e: substitute(e, psi)  # noqa: E731
    X = h.expr
    Y = Var("y")
    U = pull(Ups)
    Ux = pull(diff(Ups, "eta"))
    Uy = normalize(pull(diff(Ups, "xi")) + Var("uy") * pull(Ups_ups))
    domain = tuple(h.domain) + (h.nondegeneracy_expr,)
    phi = ContactTransform(X, Y, U, Ux, Uy, domain=tuple(d for d in domain if d.free_variables), inverse=inverse, name="Hy-admissible")
    contact = check_contact_condition(phi, box, seed)
    if not contact.passed:
        raise ContactConditionViolated(f"constructed transform fails the contact condition: {[c.name for c in contact.failures()]}")
    if jacobian_nondegenerate(phi, box=box, seed=seed).proven_zero:
        raise DegenerateDatum("constructed transform has vanishing Jacobian")
    f = f_from_h(h)
    F = induced_target(phi, f)
    target = target_from_inverse(F, inverse) if inverse is not None else None
    T = AdmissibleTransformation(f, phi, F, target)
    T.report = verify_determining_system(T, box, seed)
    return T
