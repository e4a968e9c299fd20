import random

import pytest

from hypeq import catalog
from hypeq.errors import BranchUndetermined, InverseMismatch
from hypeq.expr import ZERO, compile_expr, diff, normalize, parse, render, substitute
from hypeq.oracle import check_admissible_numeric
from hypeq.transforms import AdmissibleTransformation, ContactTransform, PointEquivalenceTransform, compose, prolong_point
from hypeq.wave_symmetry import (
    build_wave_symmetry,
    composition_table,
    discrete_catalog,
    discrete_generators,
    element_orders,
    group_structure,
    verify_wave_symmetry,
)


def oracle(phi, n=1000):
    return check_admissible_numeric(AdmissibleTransformation(ZERO, phi, ZERO, ZERO), n=n)


def test_verify_examples():
    rep = verify_wave_symmetry(ContactTransform.identity())
    assert rep.passed and rep.c == parse("1")
    rep = verify_wave_symmetry(catalog.legendre())
    assert rep.passed
    rep = verify_wave_symmetry(ContactTransform.from_strings("x + uy", "y", "u", "ux", "uy"))
    assert not rep.passed and "X depends on uy" in rep.shape_violations


def test_verify_rejects_nonconstant_c_and_coupling():
    assert not verify_wave_symmetry(prolong_point(PointEquivalenceTransform.from_strings("x", "y", "exp(u)"))).passed
    coupled = ContactTransform.from_strings("x", "y", "u + x*y", "ux + y", "uy + x")
    rep = verify_wave_symmetry(coupled)
    assert not rep.passed and any("separated" in v for v in rep.shape_violations)


def test_build_examples():
    assert build_wave_symmetry(1, "x", "y").key() == ContactTransform.identity().key()
    L = build_wave_symmetry(1, "ux", "y", Theta1="eta")
    assert L.key() == catalog.legendre().key()
    D = build_wave_symmetry(2, "ux", "uy", Theta1="eta", Theta2="eta")
    c = {k: render(v) for k, v in D.components.items()}
    assert c["U"] == "-2*ux*x - 2*uy*y + 2*u"
    assert verify_wave_symmetry(D).passed


def test_build_checks_the_inverse():
    with pytest.raises(InverseMismatch):
        build_wave_symmetry(1, "ux", "y", Theta1="eta + 1")


def test_build_branch_must_be_decidable():
    with pytest.raises(BranchUndetermined):
        build_wave_symmetry(1, "x + ux*(sin(x)^2 + cos(x)^2 - 1)", "y")


def test_point_branch_is_prolonged_point_symmetry():
    phi = build_wave_symmetry(2, "exp(x)", "y^3 + y", phi1="eta^2", phi2="sin(eta)")
    P = PointEquivalenceTransform.from_strings("exp(x)", "y^3 + y", "2*u + exp(x)^2 + sin(y^3 + y)")
    assert phi.key() == prolong_point(P).key()


def test_numeric_only_branch():
    phi = build_wave_symmetry(1, "ux*exp(x^2)", "y", Theta1="eta*exp(-x^2)")
    assert phi.is_numeric_only
    rep = verify_wave_symmetry(phi)
    assert rep.passed and rep.numeric.max_abs < 1e-6


@pytest.mark.parametrize(
    "args",
    [
        dict(c=1, X="ux", Y="y", Theta1="eta"),
        dict(c=2, X="ux", Y="uy", Theta1="eta", Theta2="eta"),
        dict(c=-1, X="ux + x", Y="y^3 + y", Theta1="eta - x", phi1="eta^2"),
        dict(c=3, X="ux^3", Y="uy + sin(y)", Theta1="eta^(1/3)", Theta2="eta - sin(y)", phi2="exp(eta)"),
        dict(c=1, X="2*ux + x^2", Y="y", Theta1="(eta - x^2)/2"),
    ],
)
def test_built_symmetries_pass_oracle(args):
    phi = build_wave_symmetry(**args)
    assert verify_wave_symmetry(phi).passed
    rep = oracle(phi)
    assert rep.passed, rep.to_json()


def _pushforward_residual(phi, phi_x, psi_y, rng, h=1e-3):
    """``u~_{x~y~}`` by finite differences on the image of ``u = phi_x(x) + psi_y(y)``."""
    u = normalize(phi_x + psi_y)
    jet = {"u": u, "ux": normalize(diff(u, "x")), "uy": normalize(diff(u, "y"))}
    comps = {c: compile_expr(normalize(substitute(getattr(phi, c), jet))) for c in ("X", "Y", "U")}

    def image(s, t):
        p = {"x": s, "y": t}
        return comps["X"](p), comps["Y"](p), comps["U"](p)

    def solve(tx, ty, s, t):
        for _ in range(60):
            X, Y, _ = image(s, t)
            e = 1e-7
            Xs, Ys, _ = image(s + e, t)
            Xt, Yt, _ = image(s, t + e)
            a, b, c, d = (Xs - X) / e, (Xt - X) / e, (Ys - Y) / e, (Yt - Y) / e
            det = a * d - b * c
            ds = ((tx - X) * d - b * (ty - Y)) / det
            dt = (a * (ty - Y) - c * (tx - X)) / det
            s, t = s + ds, t + dt
            if abs(ds) + abs(dt) < 1e-15:
                break
        return s, t

    def utilde(tx, ty, s, t):
        s, t = solve(tx, ty, s, t)
        return image(s, t)[2]

    worst = 0.0
    for _ in range(100):
        s0, t0 = rng.uniform(-1, 1), rng.uniform(-1, 1)
        X0, Y0, _ = image(s0, t0)
        vals = [utilde(X0 + a * h, Y0 + b * h, s0, t0) for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
        mixed = (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * h * h)
        worst = max(worst, abs(mixed))
    return worst


@pytest.mark.parametrize(
    "phi",
    [
        catalog.legendre(),
        catalog.double_legendre(),
        build_wave_symmetry(2, parse("ux + x"), parse("y"), Theta1=parse("eta - x")),
        discrete_catalog()[5],
    ],
    ids=["legendre", "double-legendre", "shifted-legendre", "order-four"],
)
def test_solution_level_pushforward(phi):
    rng = random.Random(17)
    worst = _pushforward_residual(phi, parse("x^3/3 + 2*x"), parse("y^2 - y"), rng)
    assert worst < 1e-8


def test_discrete_catalog_elements():
    gens = discrete_generators()
    assert all(verify_wave_symmetry(g).passed for g in gens)
    swap = gens[0]
    assert compose(swap, swap).key() == ContactTransform.identity().key()
    elements = discrete_catalog()
    assert len({e.key() for e in elements}) == 16
    assert all(verify_wave_symmetry(e).passed for e in elements)


def test_discrete_group_structure():
    elements = discrete_catalog()
    structure = group_structure(elements)
    assert structure.closed and structure.size == 16
    # swap and sx do not commute: their product has order four
    assert structure.order_counts == {1: 1, 2: 11, 4: 4}
    assert not structure.abelian and not structure.elementary_abelian_2
    table = composition_table(elements)
    orders = element_orders(elements, table)
    four = [elements[i].name for i, o in enumerate(orders) if o == 4]
    assert "sx*swap" in four
