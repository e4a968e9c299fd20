"""Contact symmetries of the wave equation ``u_xy = 0``.

Up to the swap of ``(x, ux)`` with ``(y, uy)``, every contact symmetry has the
separated form ``X(x, ux)``, ``Y(y, uy)``, ``U = c*u + U1(x, ux) + U2(y, uy)``,
``Ux(x, ux)``, ``Uy(y, uy)`` subject to

    U1_ux = Ux*X_ux,   c*ux + U1_x = Ux*X_x,
    U2_uy = Uy*Y_uy,   c*uy + U2_y = Uy*Y_y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import BranchUndetermined, ContactConditionViolated, IntegrationFailure, InverseMismatch
from .expr import (
    ZERO,
    Const,
    Expr,
    SamplerConfig,
    Var,
    adaptive_simpson,
    antiderivative,
    as_expr,
    compile_expr,
    diff,
    is_zero,
    normalize,
    render,
    replace,
    substitute,
)
from .reports import CheckReport, residual_check
from .transforms import COMPONENTS, ContactTransform, compose, swap_transform

_SIDE = {"x": ("x", "ux", "U1", "Ux", "X"), "y": ("y", "uy", "U2", "Uy", "Y")}


@dataclass
class WaveSymmetryReport:
    passed: bool
    swapped: bool = False
    c: Optional[Expr] = None
    shape_violations: list = field(default_factory=list)
    conditions: Optional[CheckReport] = None
    nondegeneracy: dict = field(default_factory=dict)
    numeric: Optional[object] = None

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "swapped": self.swapped,
            "c": render(self.c) if self.c is not None else None,
            "shape_violations": list(self.shape_violations),
            "nondegeneracy": dict(self.nondegeneracy),
        }
        if self.conditions is not None:
            out["conditions"] = self.conditions.to_json()
        if self.numeric is not None:
            out["numeric"] = self.numeric.to_json()
        return out


def _depends(e: Expr, v: str, config) -> bool:
    """Whether ``e`` genuinely depends on ``v`` (False when the derivative is ProvenZero)."""
    if v not in e.free_variables:
        return False
    return not is_zero(normalize(diff(e, v)), config).proven_zero


def _shape(phi: ContactTransform, config) -> list:
    allowed = {"X": ("x", "ux"), "Y": ("y", "uy"), "Ux": ("x", "ux"), "Uy": ("y", "uy")}
    problems = []
    for comp, ok in allowed.items():
        e = getattr(phi, comp)
        for v in ("x", "y", "u", "ux", "uy"):
            if v not in ok and _depends(e, v, config):
                problems.append(f"{comp} depends on {v}")
    return problems


def verify_wave_symmetry(phi: ContactTransform, box=None, seed: int = None, numeric_n: int = 200) -> WaveSymmetryReport:
    """Separated shape, constant ``c = U_u != 0`` and the four conditions."""
    config = SamplerConfig(avoid=phi.domain)
    if phi.is_numeric_only:
        return _verify_numeric(phi, box, seed, numeric_n)
    swapped = False
    fx, fy = phi.X.free_variables, phi.Y.free_variables
    if not (fx <= {"x", "ux"} and fy <= {"y", "uy"}) and fx <= {"y", "uy"} and fy <= {"x", "ux"}:
        phi = compose(swap_transform(), phi, verify=False)
        swapped = True
    problems = _shape(phi, config)
    c = normalize(diff(phi.U, "u"))
    if c.free_variables:
        if any(not is_zero(normalize(diff(c, v)), config).proven_zero for v in c.free_variables):
            problems.append(f"U_u = {render(c)} is not constant")
    elif c == ZERO:
        problems.append("U_u vanishes (c = 0)")
    U = phi.U
    for a in ("x", "ux"):
        for b in ("y", "uy"):
            if _depends(normalize(diff(U, a)), b, config):
                problems.append(f"U is not separated: U_{a}{b} != 0")
    if problems:
        return WaveSymmetryReport(False, swapped, c, problems)
    X, Y, Ux, Uy = phi.X, phi.Y, phi.Ux, phi.Uy
    ux, uy = Var("ux"), Var("uy")
    residuals = [
        ("U1_ux - Ux*X_ux", diff(U, "ux") - Ux * diff(X, "ux")),
        ("c*ux + U1_x - Ux*X_x", c * ux + diff(U, "x") - Ux * diff(X, "x")),
        ("U2_uy - Uy*Y_uy", diff(U, "uy") - Uy * diff(Y, "uy")),
        ("c*uy + U2_y - Uy*Y_y", c * uy + diff(U, "y") - Uy * diff(Y, "y")),
    ]
    checks = CheckReport("wave-symmetry", tuple(residual_check(n, r, phi.domain, 64, box, seed) for n, r in residuals))
    nondeg = {}
    for name, e in (("(X_x, X_ux)", diff(X, "x") ** 2 + diff(X, "ux") ** 2), ("(Y_y, Y_uy)", diff(Y, "y") ** 2 + diff(Y, "uy") ** 2)):
        st = is_zero(normalize(e), config)
        nondeg[name] = st.kind
    ok = checks.passed and all(v != "ProvenZero" for v in nondeg.values())
    return WaveSymmetryReport(ok, swapped, c, [], checks, nondeg)


def _verify_numeric(phi, box, seed, n):
    from .oracle import check_admissible_numeric
    from .transforms import AdmissibleTransformation, check_contact_condition

    T = AdmissibleTransformation(ZERO, phi, ZERO, ZERO)
    report = check_admissible_numeric(T, n=n, box=box or (-2.0, 2.0), tol=1e-6, seed=42 if seed is None else seed)
    contact = check_contact_condition(phi, box, seed, n_numeric=16)
    return WaveSymmetryReport(report.passed and contact.passed, False, None, [], contact, {}, report)


# ---------------------------------------------------------------- construction


@dataclass
class _Side:
    U1: Optional[Expr]
    Ux: Optional[Expr]
    numeric: dict


def _build_side(axis, c, X, phi1, Theta, t0, domain):
    v, jet, _, _, _ = _SIDE[axis]
    X = normalize(as_expr(X))
    allowed = {v, jet}
    if not X.free_variables <= allowed:
        raise ValueError(f"{'X' if axis == 'x' else 'Y'} may depend only on {sorted(allowed)}")
    phi1 = normalize(as_expr(phi1 if phi1 is not None else 0))
    if not phi1.free_variables <= {"eta"}:
        raise ValueError("phi must be written in eta")
    config = SamplerConfig(avoid=tuple(domain))
    X_jet = normalize(diff(X, jet))
    st = is_zero(X_jet, config)
    if st.unknown:
        raise BranchUndetermined(f"cannot decide whether d{render(X)}/d{jet} vanishes: {st.describe()}")
    phi_of_X = substitute(phi1, {"eta": X})
    if st.proven_zero:
        X_v = normalize(diff(X, v))
        if is_zero(X_v, config).proven_zero:
            raise ValueError(f"degenerate: both d/d{v} and d/d{jet} of {render(X)} vanish")
        U1 = phi_of_X
        Ux = normalize((c * Var(jet) + diff(U1, v)) / X_v)
        return _Side(U1, Ux, {})
    if Theta is None:
        raise ValueError(f"the branch with d/d{jet} != 0 needs the inverse Theta({v}, eta)")
    Theta = normalize(as_expr(Theta))
    if not Theta.free_variables <= {v, "eta"}:
        raise ValueError(f"Theta must be written in {v} and eta")
    mismatch = normalize(substitute(Theta, {"eta": X}) - Var(jet))
    mst = is_zero(mismatch, config)
    if not mst.proven_zero:
        raise InverseMismatch(f"Theta({v}, X) - {jet} = {render(mismatch)} does not vanish ({mst.describe()})")
    t0 = as_expr(t0)
    try:
        A = antiderivative(Theta, v)
        integral = normalize(A - replace(A, {v: t0}))
        U1 = normalize(-c * substitute(integral, {"eta": X}) + phi_of_X)
        Ux = normalize(diff(U1, jet) / X_jet)
        return _Side(U1, Ux, {})
    except IntegrationFailure:
        pass
    return _Side(None, None, _numeric_side(axis, c, X, phi1, Theta, float(t0.value)))


def _numeric_side(axis, c, X, phi1, Theta, t0):
    """Quadrature-backed ``U1`` and ``Ux`` (differentiation under the integral)."""
    v, jet, _, _, _ = _SIDE[axis]
    Xc = compile_expr(X)
    Th = compile_expr(Theta)
    Th_eta = compile_expr(normalize(diff(Theta, "eta")))
    ph = compile_expr(phi1)
    dph = compile_expr(normalize(diff(phi1, "eta")))
    cf = float(c.value)

    def U1(p):
        eta = Xc(p)
        return -cf * adaptive_simpson(lambda s: Th({v: s, "eta": eta}), t0, p[v], 1e-10) + ph({"eta": eta})

    def Ux(p):
        eta = Xc(p)
        return -cf * adaptive_simpson(lambda s: Th_eta({v: s, "eta": eta}), t0, p[v], 1e-10) + dph({"eta": eta})

    return {"U1": U1, "Ux": Ux}


def build_wave_symmetry(c, X, Y, phi1=0, phi2=0, Theta1=None, Theta2=None, t0=0, s0=0, domain=()) -> ContactTransform:
    """Assemble a contact symmetry of the wave equation from its free data.

    ``X(x, ux)`` and ``Y(y, uy)`` choose the branch on each axis: when
    ``X_ux != 0`` the inverse ``Theta1(x, eta)`` (with ``Theta1(x, X) = ux``)
    is required and ``U1 = -c*int_{t0}^x Theta1(s, X) ds + phi1(X)``;
    otherwise ``U1 = phi1(X)``.  ``phi1`` and ``phi2`` are written in ``eta``.
    Integrals outside the table yield a numeric-only transform.
    """
    c = normalize(as_expr(c))
    if c.free_variables or c == ZERO:
        raise ValueError("c must be a nonzero constant")
    left = _build_side("x", c, X, phi1, Theta1, t0, domain)
    right = _build_side("y", c, Y, phi2, Theta2, s0, domain)
    X, Y = normalize(as_expr(X)), normalize(as_expr(Y))
    u = Var("u")
    if not left.numeric and not right.numeric:
        U = normalize(c * u + left.U1 + right.U1)
        phi = ContactTransform(X, Y, U, left.Ux, right.Ux, tuple(as_expr(d) for d in domain), name="wave-symmetry")
        report = verify_wave_symmetry(phi)
        if not report.passed and report.conditions is not None and any(ch.status.proven_nonzero for ch in report.conditions.checks):
            raise ContactConditionViolated(f"constructed symmetry fails its conditions: {[ch.name for ch in report.conditions.failures()]}")
        return phi
    # at least one side is quadrature-backed
    cf = float(c.value)
    U1c = left.numeric.get("U1") or compile_expr(left.U1)
    U2c = right.numeric.get("U1") or compile_expr(right.U1)
    Uxc = left.numeric.get("Ux") or compile_expr(left.Ux)
    Uyc = right.numeric.get("Ux") or compile_expr(right.Ux)
    numeric = {
        "U": lambda p: cf * p["u"] + U1c(p) + U2c(p),
        "Ux": Uxc,
        "Uy": Uyc,
    }
    placeholder = Var("u")
    return ContactTransform(
        X,
        Y,
        placeholder,
        left.Ux if left.Ux is not None else Var("ux"),
        right.Ux if right.Ux is not None else Var("uy"),
        tuple(as_expr(d) for d in domain),
        name="wave-symmetry (numeric)",
        numeric=numeric,
    )


# ---------------------------------------------------------------- discrete transformations


def discrete_generators() -> list:
    """Swap and the three sign changes."""
    x, y, u, ux, uy = (Var(n) for n in ("x", "y", "u", "ux", "uy"))
    gens = [
        ContactTransform(y, x, u, uy, ux, name="swap"),
        ContactTransform(-x, y, u, -ux, uy, name="sx"),
        ContactTransform(x, -y, u, ux, -uy, name="sy"),
        ContactTransform(x, y, -u, -ux, -uy, name="su"),
    ]
    for g in gens:
        object.__setattr__(g, "inverse", g)
    return gens


def discrete_catalog() -> list:
    """All products of the generators, deduplicated by normalized components.

    Elements are produced breadth-first from the identity, so the list order
    (and each element's word name) is deterministic.
    """
    gens = discrete_generators()
    identity = ContactTransform.identity()
    elements = [identity]
    keys = {identity.key(): 0}
    frontier = [identity]
    while frontier:
        nxt = []
        for elem in frontier:
            for g in gens:
                prod = compose(g, elem, verify=False, with_inverse=False)
                k = prod.key()
                if k in keys:
                    continue
                word = g.name if elem.name == "identity" else f"{g.name}*{elem.name}"
                prod = ContactTransform(*k, name=word)
                keys[k] = len(elements)
                elements.append(prod)
                nxt.append(prod)
        frontier = nxt
    return elements


def composition_table(elements) -> list:
    """``table[i][j]`` is the index of ``elements[i] o elements[j]`` (or -1)."""
    index = {e.key(): i for i, e in enumerate(elements)}
    return [[index.get(compose(a, b, verify=False, with_inverse=False).key(), -1) for b in elements] for a in elements]


def element_orders(elements, table=None) -> list:
    table = table or composition_table(elements)
    ident = next(i for i, e in enumerate(elements) if e.key() == ContactTransform.identity().key())
    orders = []
    for i in range(len(elements)):
        k, cur = 1, i
        while cur != ident:
            cur = table[i][cur]
            k += 1
            if k > len(elements):
                break
        orders.append(k)
    return orders


@dataclass
class GroupStructure:
    size: int
    closed: bool
    abelian: bool
    orders: list
    order_counts: dict
    elementary_abelian_2: bool
    description: str

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "closed": self.closed,
            "abelian": self.abelian,
            "orders": self.orders,
            "order_counts": self.order_counts,
            "isomorphic_to_Z2^4": self.elementary_abelian_2,
            "description": self.description,
        }


def group_structure(elements=None) -> GroupStructure:
    """Closure and element orders of the discrete catalog, with commutativity."""
    elements = elements if elements is not None else discrete_catalog()
    table = composition_table(elements)
    n = len(elements)
    closed = all(v >= 0 for row in table for v in row)
    abelian = all(table[i][j] == table[j][i] for i in range(n) for j in range(n))
    orders = element_orders(elements, table)
    counts = {}
    for o in orders:
        counts[o] = counts.get(o, 0) + 1
    elem2 = closed and abelian and all(o <= 2 for o in orders)
    if elem2:
        desc = f"elementary abelian 2-group of order {n}"
    elif n == 16 and not abelian and counts.get(4, 0) == 4 and counts.get(2, 0) == 11:
        desc = "non-abelian group of order 16 with 11 involutions and 4 elements of order 4 (dihedral group of order 8 times Z2)"
    else:
        desc = f"group of order {n}, abelian={abelian}, order counts {dict(sorted(counts.items()))}"
    return GroupStructure(n, closed, abelian, orders, dict(sorted(counts.items())), elem2, desc)
