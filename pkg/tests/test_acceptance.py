"""Acceptance criteria, one test (or pair) per criterion.

Each criterion appends a PASS/FAIL line that is printed in the terminal
summary.  Run standalone with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time

import pytest

import conftest
from exprgen import corpus
from hypeq import catalog
from hypeq.classifier import C1, HX_PRIME, HXY, HY_PRIME, INDETERMINATE, classify
from hypeq.darboux import f_from_h, f_from_theta, gauge_h, reconstruct_theta, verify_determining_system
from hypeq.errors import EvaluationError
from hypeq.expr import ZERO, compile_expr, diff, is_zero, normalize, parse, render
from hypeq.oracle import check_admissible_numeric
from hypeq.transforms import AdmissibleTransformation, ContactTransform, apply_point_equivalence, check_contact_condition, target_in_source_names
from hypeq.wave_symmetry import discrete_catalog, group_structure, verify_wave_symmetry

EXPECTED = {
    "wave": HXY,
    "log-wave": HXY,
    "quasilinear-x": HY_PRIME,
    "quasilinear-y": HX_PRIME,
    "liouville": C1,
    "sine-gordon": C1,
    "klein-gordon": C1,
    "tzitzeica": C1,
}


def record(k, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _run(k, body):
    """Run ``body() -> (ok, detail)`` and record the outcome, errors included."""
    try:
        ok, detail = body()
    except Exception as exc:
        record(k, False, f"{type(exc).__name__}: {exc}")
        raise
    record(k, ok, detail)
    assert ok, detail


def test_criterion_1_catalog_classification():
    def body():
        t = time.perf_counter()
        wrong, undecided = [], []
        for name, label in EXPECTED.items():
            report = classify(catalog.get(name).f)
            if report.label != label:
                wrong.append(f"{name}->{report.label}")
            for check in (report.hx, report.hy):
                if any(not (r.status.proven_zero or r.status.proven_nonzero) for r in check.residuals):
                    undecided.append(f"{name}:{check.subclass}")
        elapsed = time.perf_counter() - t
        ok = not wrong and not undecided and elapsed < 5
        return ok, f"8 equations, mismatches {wrong}, undecided residuals {undecided}, {elapsed:.2f} s (limit 5 s)"

    _run(1, body)


def test_criterion_2_class_invariance():
    def body():
        t = time.perf_counter()
        templates = catalog.point_transform_templates(seed=42, n=100)
        mismatches, count = [], 0
        for P in templates:
            for name, label in EXPECTED.items():
                app = apply_point_equivalence(P, catalog.get(name).f)
                if app.target is None:
                    mismatches.append(f"{P.name} not inverted")
                    continue
                got = classify(target_in_source_names(app.target)).label
                count += 1
                if got != label:
                    mismatches.append(f"{P.name} on {name}: {got}")
        elapsed = time.perf_counter() - t
        ok = not mismatches and count == 800 and elapsed < 120
        return ok, f"{count} classifications, {len(mismatches)} mismatches {mismatches[:3]}, {elapsed:.1f} s (limit 120 s)"

    _run(2, body)


def test_criterion_3_wave_orbit():
    def body():
        bad = []
        for text in catalog.THETA_TEMPLATES:
            f = f_from_theta(parse(text))
            if classify(f).label != HXY:
                bad.append(f"{text}: not Hxy")
                continue
            rec = reconstruct_theta(f)
            if not is_zero(normalize(f_from_theta(rec.theta) - f)).proven_zero:
                bad.append(f"{text}: reconstruction {render(rec.theta)} does not reproduce f")
        log_wave = parse("ux*uy")
        rec = reconstruct_theta(log_wave)
        exact = normalize(f_from_theta(rec.theta)) == normalize(log_wave) and normalize(f_from_theta(parse("exp(u)"))) == normalize(log_wave)
        if not exact:
            bad.append(f"ux*uy: recovered {render(rec.theta)}")
        return not bad, f"{len(catalog.THETA_TEMPLATES)} theta templates, failures {bad}; ux*uy recovers theta = {render(rec.theta)}"

    _run(3, body)


def test_criterion_4_worked_contact_transform():
    def body():
        T = catalog.worked_Hy()
        phi = T.transform
        shape = normalize(phi.X) == normalize(parse("-1/ux - y")) and normalize(phi.U) == normalize(parse("u - x*ux"))
        pull = is_zero(normalize(T.target_pullback - parse("-2*x*ux^3"))).proven_zero
        symbolic = verify_determining_system(T).passed
        numeric = check_admissible_numeric(T, n=1000)
        target = T.target is not None and classify(target_in_source_names(T.target)).label == HY_PRIME
        displayed = classify(parse("-2*ux/(x + y)")).label == HY_PRIME
        ok = shape and pull and symbolic and numeric.passed and numeric.max_abs < 1e-9 and target and displayed
        detail = (
            f"components {shape}, pullback -2*x*ux^3 {pull}, determining system {symbolic}, "
            f"oracle max {numeric.max_abs:.2e} over {numeric.samples} jets, target HyPrime {target and displayed}"
        )
        return ok, detail

    _run(4, body)


def _wave_pair(phi):
    return AdmissibleTransformation(ZERO, phi, ZERO, ZERO)


def test_criterion_5_wave_symmetries_verified():
    def body():
        named = [ContactTransform.identity(), catalog.legendre(), catalog.double_legendre()] + discrete_catalog()
        worst, failed = 0.0, []
        for phi in named:
            rep = verify_wave_symmetry(phi)
            num = check_admissible_numeric(_wave_pair(phi), n=1000)
            worst = max(worst, num.max_abs)
            if not (rep.passed and num.passed):
                failed.append(phi.name or "?")
        distinct = len({e.key() for e in discrete_catalog()})
        ok = not failed and worst < 1e-9 and distinct == 16
        return ok, f"{len(named)} transforms verified, failures {failed}, max residual {worst:.2e}, {distinct} distinct discrete elements"

    _run("5a", body)


@pytest.mark.xfail(strict=True, reason="the discrete composition table is D4 x Z2, not Z2^4: swap*sx has order four")
def test_criterion_5_discrete_group_is_elementary_abelian():
    s = group_structure()
    ok = s.closed and s.size == 16 and max(s.orders) <= 2
    record("5b", ok, f"closed {s.closed}, size {s.size}, order counts {s.order_counts}, abelian {s.abelian}: {s.description}")
    assert ok


def test_criterion_6_gauge_invariance():
    def body():
        bad = []
        for h in catalog.H_DATA:
            base = f_from_h(parse(h))
            for H in catalog.GAUGE_TEMPLATES:
                gauged = gauge_h(parse(h), parse(H))
                if not is_zero(normalize(f_from_h(gauged) - base)).proven_zero:
                    bad.append(f"h={h}, H={H}")
        n = len(catalog.H_DATA) * len(catalog.GAUGE_TEMPLATES)
        return not bad, f"{n} gauge changes, failures {bad}"

    _run(6, body)


def _central(f, p, v, h):
    q = dict(p)
    q[v] = p[v] + h
    a = f(q)
    q[v] = p[v] - h
    return (a - f(q)) / (2 * h)


def test_criterion_7_differentiation_engine():
    def body():
        fd_bad, idem_bad, eval_bad, skipped, worst_fd, worst_eval = 0, 0, 0, 0, 0.0, 0.0
        for i, (e, p) in enumerate(corpus(500)):
            names = sorted(e.free_variables)
            f = compile_expr(e)
            if names:
                v = names[i % len(names)]
                try:
                    h = 1e-5
                    fd = (4 * _central(f, p, v, h / 2) - _central(f, p, v, h)) / 3
                    an = compile_expr(diff(e, v))(p)
                except EvaluationError:
                    skipped += 1
                else:
                    err = abs(fd - an) / max(1.0, abs(an))
                    worst_fd = max(worst_fd, err)
                    fd_bad += err >= 1e-6
            n = normalize(e)
            idem_bad += normalize(n) != n
            try:
                ev, nv = f(p), compile_expr(n)(p)
            except EvaluationError:
                eval_bad += 1
                continue
            r = abs(nv - ev) / max(1.0, abs(ev))
            worst_eval = max(worst_eval, r)
            eval_bad += r >= 1e-12
        ok = fd_bad == 0 and idem_bad == 0 and eval_bad == 0 and skipped < 25
        detail = (
            f"500 pairs: FD failures {fd_bad} (worst {worst_fd:.1e}, skipped {skipped}), "
            f"idempotence failures {idem_bad}, evaluation failures {eval_bad} (worst {worst_eval:.1e})"
        )
        return ok, detail

    _run(7, body)


def test_criterion_8_negative_controls():
    def body():
        contact = check_contact_condition(catalog.tampered_legendre())
        numeric = check_admissible_numeric(catalog.mismatched_pair(), n=1000)
        ok = not contact.passed and contact.decided and not numeric.passed and numeric.max_abs > 0.1
        return ok, f"tampered Legendre contact passed={contact.passed}, mismatched pair max residual {numeric.max_abs:.3g}"

    _run(8, body)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
