import math

import pytest

from hypeq import catalog
from hypeq.classifier import HXY, HY_PRIME, classify
from hypeq.darboux import (
    DISPLAYED,
    EQUATION,
    DarbouxDatum,
    build_Hy_admissible,
    determining_residuals,
    f_from_g,
    f_from_h,
    f_from_theta,
    gauge_g,
    gauge_h,
    induced_target,
    reconstruct_theta,
    verify_determining_system,
)
from hypeq.errors import ContactConditionViolated, DegenerateDatum, IntegrationFailure, NotInHxy
from hypeq.expr import Const, compile_expr, is_zero, normalize, parse, render
from hypeq.jets import from_tilde
from hypeq.oracle import check_admissible_numeric
from hypeq.transforms import AdmissibleTransformation, PointEquivalenceTransform, prolong_point


def r(e):
    return render(normalize(e))


@pytest.mark.parametrize("h,f", [("ux", "0"), ("-1/ux - y", "ux^2"), ("ux - u", "uy")])
def test_f_from_h(h, f):
    assert r(f_from_h(parse(h))) == f


@pytest.mark.parametrize("g,f", [("uy", "0"), ("-1/uy - x", "uy^2"), ("uy - u", "ux")])
def test_f_from_g(g, f):
    assert r(f_from_g(parse(g))) == f


@pytest.mark.parametrize("theta,f", [("u", "0"), ("exp(u)", "ux*uy"), ("x*u", "uy/x")])
def test_f_from_theta(theta, f):
    assert r(f_from_theta(parse(theta))) == f


def test_theta_sign_conventions():
    theta = parse("u*exp(x + y)")
    assert r(f_from_theta(theta, DISPLAYED)) == "u + ux + uy"
    assert r(f_from_theta(theta, EQUATION)) == "-u - ux - uy"
    # only the sign that solves D_x D_y theta = 0 lands in the bilinear subclass
    assert classify(f_from_theta(theta, EQUATION)).label == HXY
    assert classify(f_from_theta(theta, DISPLAYED)).label != HXY


def test_degenerate_data():
    with pytest.raises(DegenerateDatum):
        f_from_h(parse("u + y"))
    with pytest.raises(DegenerateDatum):
        f_from_theta(parse("x*y"))
    with pytest.raises(ValueError):
        DarbouxDatum("h", parse("uy"))


@pytest.mark.parametrize("H", ["2*eta", "eta + x^2", "exp(eta)"])
def test_gauge_keeps_f(H):
    h = parse("-1/ux - y")
    g = gauge_h(h, parse(H))
    assert is_zero(normalize(f_from_h(g) - f_from_h(h))).proven_zero


def test_gauge_g_keeps_f():
    g = parse("-1/uy - x")
    assert is_zero(normalize(f_from_g(gauge_g(g, parse("exp(eta) + y"))) - f_from_g(g))).proven_zero


def test_reconstruct_examples():
    assert render(reconstruct_theta(Const(0)).theta) == "u"
    rec = reconstruct_theta(parse("ux*uy"))
    assert render(rec.theta) == "exp(u)" and rec.verified
    with pytest.raises(NotInHxy):
        reconstruct_theta(parse("u"))


def test_reconstruct_in_equation_sign():
    rec = reconstruct_theta(parse("-u - ux - uy"), convention=EQUATION)
    assert rec.verified


def test_reconstruct_needs_base_point_away_from_poles():
    rec = reconstruct_theta(parse("uy/x"))
    assert rec.verified and rec.base_point[0] != 0


def test_reconstruct_integration_failure_has_numeric_fallback():
    f = parse("exp(x^2)*uy")  # w = int exp(x^2) dx is outside the table
    with pytest.raises(IntegrationFailure) as info:
        reconstruct_theta(f)
    numeric = info.value.numeric
    assert numeric is not None
    # the numeric theta satisfies theta_u = e^w: compare with a difference quotient
    p = {"x": 0.4, "y": 0.2, "u": 0.3}
    h = 1e-4
    up = numeric({**p, "u": p["u"] + h})
    dn = numeric({**p, "u": p["u"] - h})
    assert (up - dn) / (2 * h) == pytest.approx(math.exp(numeric.w(0.4, 0.2, 0.3)), rel=1e-6)


def test_worked_Hy_example():
    T = catalog.worked_Hy()
    c = {k: r(v) for k, v in T.transform.components.items()}
    assert c["Y"] == "y" and c["U"] == "-(ux*x) + u"
    assert c["Ux"] == "-(ux^2*x)" and c["Uy"] == "-(ux^2*x) + uy"
    assert is_zero(normalize(T.transform.X - parse("-1/ux - y"))).proven_zero
    assert r(T.source) == "ux^2"
    assert r(T.target_pullback) == "-2*ux^3*x"
    assert r(T.target) == "-2*tux/(tx + ty)"
    assert T.report.passed
    assert classify(from_tilde(T.target)).label == HY_PRIME


def test_Hy_compatibility_is_enforced():
    with pytest.raises(ContactConditionViolated) as info:
        build_Hy_admissible(parse("-1/ux - y"), parse("ups + eta^2/2"), parse("-1/(eta + xi)"))
    assert "-1/(eta + xi)" in str(info.value)


def test_Hy_recovers_partial_legendre_on_wave():
    T = build_Hy_admissible(parse("ux"), parse("ups - tau*eta"), parse("eta"))
    assert T.transform.key() == catalog.legendre().key()
    assert T.source == Const(0) and normalize(T.target_pullback) == Const(0)
    assert T.report.passed


def test_Hy_outputs_live_over_Hx_or_Hy():
    T = catalog.worked_Hy()
    assert classify(T.source).label in (HXY, HY_PRIME)
    assert classify(from_tilde(T.target)).label in (HXY, HY_PRIME)
    rep = check_admissible_numeric(T, n=1000)
    assert rep.passed and rep.max_abs < 1e-9


def test_induced_target_examples():
    T = catalog.worked_Hy()
    assert r(induced_target(T.transform, parse("ux^2"))) == "-2*ux^3*x"
    assert normalize(induced_target(catalog.legendre(), Const(0))) == Const(0)
    P = PointEquivalenceTransform.from_strings("2*x", "y", "exp(u)")
    from hypeq.transforms import pullback_target_point

    assert is_zero(normalize(induced_target(prolong_point(P), parse("ux")) - pullback_target_point(P, parse("ux")))).proven_zero


def test_determining_system_failures():
    T = AdmissibleTransformation(parse("u"), catalog.legendre(), Const(0))
    rep = verify_determining_system(T)
    assert not rep.passed
    a1 = rep.checks[0]
    assert a1.name.startswith("a1") and render(a1.residual) == "u"


def test_determining_system_on_point_transforms():
    P = PointEquivalenceTransform.from_strings("exp(x)", "2*y + 1", "u*exp(y)")
    phi = prolong_point(P)
    f = parse("ux*uy")
    T = AdmissibleTransformation(f, phi, induced_target(phi, f))
    assert verify_determining_system(T).passed


def test_determining_residual_names():
    names = [n for n, _ in determining_residuals(catalog.legendre(), Const(0), Const(0))]
    assert [n.split(":")[0] for n in names] == ["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"]
