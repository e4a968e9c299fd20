import random

import pytest
from hypothesis import given, settings, strategies as st

from exprgen import random_expr
from hypeq.errors import JetOrderError
from hypeq.expr import Const, compile_expr, is_zero, normalize, parse, render, substitute
from hypeq.jets import (
    JET2,
    JetPoint2,
    characteristic_apply,
    from_tilde,
    swap_xy,
    to_tilde,
    total_derivative2,
    truncated_total_derivative,
)


def test_truncated_total_derivative_examples():
    assert normalize(truncated_total_derivative(parse("-1/ux - y"), "y")) == Const(-1)
    assert render(normalize(truncated_total_derivative(parse("u"), "x"))) == "ux"
    assert render(normalize(truncated_total_derivative(parse("x*ux"), "x"))) == "ux"


def test_total_derivative2_examples():
    assert render(normalize(total_derivative2(parse("u - x*ux"), "x"))) == "-(uxx*x)"
    Dyh = normalize(total_derivative2(parse("-1/ux - y"), "y"))
    assert is_zero(normalize(Dyh - parse("uxy/ux^2 - 1"))).proven_zero
    assert normalize(total_derivative2(parse("y"), "x")) == Const(0)


def test_total_derivative_capped_at_second_jet():
    with pytest.raises(JetOrderError):
        total_derivative2(parse("uxx"), "x")


def test_characteristic_examples():
    f = parse("ux^2")
    assert normalize(characteristic_apply(parse("-1/ux - y"), f, "Dy")) == Const(0)
    assert characteristic_apply(parse("x*ux + u"), f, "d_uy") == Const(0)
    assert render(normalize(characteristic_apply(parse("u"), f, "Dx"))) == "ux"


def test_tilde_round_trip():
    e = parse("ux*uy/u + x")
    assert render(to_tilde(e)) == "tux*tuy/tu + tx"
    assert from_tilde(to_tilde(e)) == e
    assert swap_xy(swap_xy(e)) == e


@given(st.integers(0, 5000))
@settings(max_examples=40, deadline=None)
def test_truncated_equals_full_on_base_functions(seed):
    rng = random.Random(seed)
    e = random_expr(rng, 4)
    e = normalize(e)
    if e.free_variables - {"x", "y", "u"}:
        e = normalize(substitute(e, {"ux": parse("x*y"), "uy": parse("u + 1")}))
    for axis in ("x", "y"):
        diff_ = normalize(truncated_total_derivative(e, axis) - total_derivative2(e, axis))
        assert is_zero(diff_).proven_zero


def test_total_derivative_matches_solution_germ():
    # along u = polynomial 2-jet germ through the sampled jet, D_x e equals d/dx of e(germ)
    rng = random.Random(11)
    f = parse("ux*uy")
    for _ in range(20):
        e = random_expr(rng, 3)
        j = {k: rng.uniform(-1, 1) for k in JET2}
        j["uxy"] = compile_expr(f)(j)
        def germ(t):
            p = dict(j)
            p["x"] = j["x"] + t
            p["u"] = j["u"] + j["ux"] * t + j["uxx"] * t * t / 2
            p["ux"] = j["ux"] + j["uxx"] * t
            p["uy"] = j["uy"] + j["uxy"] * t
            return p
        fn = compile_expr(e)
        try:
            h = 1e-5
            fd = (fn(germ(h)) - fn(germ(-h))) / (2 * h)
            exact = compile_expr(total_derivative2(e, "x"))(j)
        except Exception:
            continue
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


def test_jet_point():
    j = JetPoint2(0, 0, 0, 1, 2, 3, 0, 5, on_equation=True)
    assert j.first() == {"x": 0, "y": 0, "u": 0, "ux": 1, "uy": 2}
    assert j.to_json()["on_equation"] is True
