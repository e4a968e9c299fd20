import random

import pytest
from hypothesis import given, settings, strategies as st

from hypeq import catalog
from hypeq.classifier import (
    C1,
    HX_PRIME,
    HXY,
    HY_PRIME,
    INDETERMINATE,
    LABELS,
    MEMBER,
    NOT_AFFINE,
    NOT_MEMBER,
    check_Hx,
    check_Hxy,
    check_Hy,
    classify,
    swapped_label,
)
from hypeq.darboux import EQUATION, f_from_h, f_from_theta
from hypeq.expr import parse, render
from hypeq.jets import swap_xy


def test_check_Hx_examples():
    assert check_Hx(parse("0")).outcome == MEMBER
    liouville = check_Hx(parse("exp(u)"))
    assert liouville.outcome == NOT_MEMBER
    st_ = liouville.residuals[0].status
    assert render(liouville.residuals[0].residual) == "-exp(u)" and st_.proven_nonzero
    assert check_Hx(parse("ux^2")).outcome == NOT_AFFINE


def test_check_Hy_examples():
    r = check_Hy(parse("ux^2"))
    assert r.outcome == MEMBER and render(r.coefficients["F0"]) == "ux^2"
    r = check_Hy(parse("u"))
    assert r.outcome == NOT_MEMBER and render(r.residuals[0].residual) == "-1"
    assert check_Hy(parse("0")).member


def test_check_Hxy_examples():
    assert check_Hxy(parse("ux*uy")).member
    assert check_Hxy(parse("-uy")).member
    r = check_Hxy(parse("sin(u)"))
    assert r.outcome == NOT_MEMBER
    assert any(c.status.proven_nonzero for c in r.residuals)


@pytest.mark.parametrize("entry", catalog.entries(), ids=lambda e: e.name)
def test_catalog_golden_labels(entry):
    report = classify(entry.f)
    assert report.label == entry.label
    for check in (report.hx, report.hy):
        assert check.decisive
        assert all(r.status.proven_zero or r.status.proven_nonzero for r in check.residuals)


def test_indeterminate_on_unknown_residual():
    # the residual sin(u)^2 + cos(u)^2 - 1 is zero but outside the rational theory
    f = parse("(sin(u)^2 + cos(u)^2 - 1)*ux*exp(u)")
    report = classify(f)
    assert report.label == INDETERMINATE
    assert report.to_json()["inconclusive"]


@pytest.mark.parametrize("entry", catalog.entries(), ids=lambda e: e.name)
def test_swap_equivariance(entry):
    assert classify(swap_xy(entry.f)).label == swapped_label(entry.label)


def test_labels_partition():
    assert set(LABELS) == {HXY, HX_PRIME, HY_PRIME, C1, INDETERMINATE}


@given(st.sampled_from(catalog.H_DATA), st.sampled_from(catalog.GAUGE_TEMPLATES))
@settings(max_examples=20, deadline=None)
def test_f_from_h_lands_in_Hy(h, H):
    from hypeq.darboux import gauge_h

    label = classify(f_from_h(gauge_h(parse(h), parse(H)))).label
    assert label in (HXY, HY_PRIME)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_theta_images_are_bilinear_in_equation_sign(seed):
    rng = random.Random(seed)
    coeff = rng.choice(["1", "x", "exp(y)", "(1 + x^2)", "y^2 + 2"])
    shape = rng.choice(["u", "exp(u)", "u^3 + u", "exp(2*u)"])
    extra = rng.choice(["0", "x*y", "sin(x)*y", "exp(x + y)"])
    theta = parse(f"{coeff}*{shape} + {extra}")
    assert classify(f_from_theta(theta, EQUATION)).label == HXY
