"""``hypeq`` command line.

Every subcommand writes one JSON payload (``--json``) or an aligned
``key: value`` table to stdout and diagnostics to stderr.  Exit codes:
0 success or pass, 1 verified failure, 2 indeterminate, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import catalog
from .classifier import INDETERMINATE, classify
from .darboux import (
    CONVENTIONS,
    DISPLAYED,
    DarbouxDatum,
    build_Hy_admissible,
    f_from_g,
    f_from_h,
    f_from_theta,
    gauge_g,
    gauge_h,
    reconstruct_theta,
    verify_determining_system,
)
from .errors import (
    BranchUndetermined,
    ContactConditionViolated,
    DegenerateDatum,
    DegenerateTransform,
    DomainMismatch,
    HypeqError,
    Indeterminate,
    IntegrationFailure,
    InverseMismatch,
    NotInCatalog,
    NotInHxy,
    ParseError,
    UnknownName,
)
from .expr import SamplerConfig, normalize, parse, render
from .oracle import check_admissible_numeric
from .sampling import DEFAULT_BOX, DEFAULT_SEED, parse_box
from .transforms import (
    AdmissibleTransformation,
    ContactTransform,
    PointEquivalenceTransform,
    admissible_from_json,
    apply_point_equivalence,
    as_contact,
    check_contact_condition,
    compose,
    parse_domain,
    prolong_point,
    target_in_source_names,
    transform_from_json,
)
from .wave_symmetry import build_wave_symmetry, discrete_catalog, group_structure, verify_wave_symmetry

OK, FAIL, UNDECIDED, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CommandResult:
    code: int
    payload: Optional[dict] = None
    diagnostics: list = field(default_factory=list)
    json_mode: bool = False

    def render(self) -> str:
        if self.payload is None:
            return ""
        return json.dumps(self.payload, indent=2) if self.json_mode else _human(self.payload)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- options


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--domain", action="append", default=None, help="comma-separated inequations such as 'ux!=0,x>0'")
    g.add_argument("--numeric", type=int, default=None, metavar="N", help="run the numeric oracle on N jets")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--box", default=None, metavar="LO:HI")
    g.add_argument("--json", action="store_true", help="machine-readable JSON payload")
    g.add_argument("--jobs", type=int, default=None, metavar="N")
    g.add_argument("--config", default=None, metavar="PATH", help="JSON file with default option values")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="hypeq", description="Contact equivalence of hyperbolic equations u_xy = f(x, y, u, ux, uy).")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("classify", parents=[common], help="label u_xy = f as Hxy, HxPrime, HyPrime or C1")
    p.add_argument("--f", required=True)

    p = sub.add_parser("transform", parents=[common], help="apply a point equivalence transformation to u_xy = f")
    _point_args(p)
    p.add_argument("--f", required=True)

    p = sub.add_parser("prolong", parents=[common], help="first prolongation of a point transformation")
    _point_args(p)

    p = sub.add_parser("compose", parents=[common], help="compose two transforms (the second after the first)")
    p.add_argument("--bundle", action="append", required=True, help="give twice: first, then second")

    p = sub.add_parser("verify", parents=[common], help="check a bundle symbolically (contact condition, determining system) or numerically")
    p.add_argument("--bundle", required=True)
    p.add_argument("--contact", action="store_true")
    p.add_argument("--determining", action="store_true")
    p.add_argument("--mode", choices=("auto", "explicit", "implicit"), default="auto")

    p = sub.add_parser("reduce-to-wave", parents=[common], help="theta with u~ = theta(x, y, u) mapping u_xy = f to the wave equation")
    p.add_argument("--f", required=True)
    p.add_argument("--convention", choices=CONVENTIONS, default=DISPLAYED)

    p = sub.add_parser("darboux", parents=[common], help="equations from Darboux data and gauge changes")
    p.add_argument("action", choices=("f-from-h", "f-from-g", "f-from-theta", "gauge"))
    p.add_argument("--expr", required=True, help="the datum h, g or theta")
    p.add_argument("--kind", choices=("h", "g"), default="h", help="datum kind for gauge")
    p.add_argument("--gauge", help="gauge function of (x, eta) for h or (y, eta) for g")
    p.add_argument("--convention", choices=CONVENTIONS, default=DISPLAYED)

    p = sub.add_parser("hy-admissible", parents=[common], help="genuine contact admissible transformation from a datum h")
    p.add_argument("--h", required=True)
    p.add_argument("--upsilon", required=True, help="expression in tau, xi, ups, eta")
    p.add_argument("--hfun", required=True, help="inverse of h in ux, expression in tau, xi, ups, eta")
    p.add_argument("--inverse", help="bundle with the inverse transform, to express the target in tilde variables")

    p = sub.add_parser("wave-symmetry", parents=[common], help="contact symmetries of u_xy = 0")
    p.add_argument("action", choices=("verify", "build", "catalog"))
    p.add_argument("--bundle")
    p.add_argument("--c", default="1")
    p.add_argument("--X", default="x")
    p.add_argument("--Y", default="y")
    p.add_argument("--phi1", default="0")
    p.add_argument("--phi2", default="0")
    p.add_argument("--theta1")
    p.add_argument("--theta2")
    p.add_argument("--t0", default="0")

    p = sub.add_parser("catalog", parents=[common], help="built-in equations and templates; worked bundles")
    p.add_argument("action", nargs="?", choices=("list", "show", "bundle", "templates", "dump"), default="list")
    p.add_argument("name", nargs="?")
    p.add_argument("--n", type=int, default=10)
    return parser


def _point_args(p):
    p.add_argument("--bundle")
    p.add_argument("--X")
    p.add_argument("--Y")
    p.add_argument("--U")
    p.add_argument("--swap", action="store_true")


@dataclass
class Settings:
    seed: int = DEFAULT_SEED
    box: tuple = DEFAULT_BOX
    tol: float = 1e-9
    numeric: Optional[int] = None
    jobs: Optional[int] = None
    domain: tuple = ()
    json: bool = False

    @property
    def sampler(self) -> SamplerConfig:
        return SamplerConfig(box=self.box, seed=self.seed, avoid=self.domain)


def _settings(args, env) -> Settings:
    s = Settings()
    if env.get("HYPEQ_SEED"):
        try:
            s.seed = int(env["HYPEQ_SEED"])
        except ValueError:
            raise UsageError(f"HYPEQ_SEED must be an integer, not {env['HYPEQ_SEED']!r}") from None
    config = {}
    if args.config:
        config = _read_json(args.config)
        if not isinstance(config, dict):
            raise UsageError("--config must contain a JSON object")
    for key in ("seed", "tol", "numeric", "jobs"):
        value = getattr(args, key)
        if value is None:
            value = config.get(key)
        if value is not None:
            setattr(s, key, value)
    box = args.box if args.box is not None else config.get("box")
    if box is not None:
        s.box = parse_box(box) if isinstance(box, str) else tuple(float(b) for b in box)
    domain = args.domain if args.domain is not None else config.get("domain")
    if domain:
        items = [domain] if isinstance(domain, str) else list(domain)
        s.domain = parse_domain([piece for item in items for piece in item.split(",") if piece.strip()])
    s.json = args.json or bool(config.get("json", False))
    return s


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


# ---------------------------------------------------------------- commands


def _cmd_classify(args, s):
    report = classify(parse(args.f), s.domain, s.sampler)
    payload = report.to_json()
    return CommandResult(UNDECIDED if report.label == INDETERMINATE else OK, payload)


def _point_from_args(args) -> PointEquivalenceTransform:
    if args.bundle:
        t = transform_from_json(_read_json(args.bundle))
        if not isinstance(t, PointEquivalenceTransform):
            raise UsageError("the bundle must describe a point transformation (kind 'point')")
        return t
    if not (args.X and args.Y and args.U):
        raise UsageError("give --bundle or all of --X, --Y, --U")
    return PointEquivalenceTransform.from_strings(args.X, args.Y, args.U, args.swap)


def _numeric(T, s, mode="auto"):
    report = check_admissible_numeric(T, n=s.numeric, box=s.box, tol=s.tol, seed=s.seed, jobs=s.jobs, mode=mode)
    return report


def _cmd_transform(args, s):
    P = _point_from_args(args)
    app = apply_point_equivalence(P, parse(args.f), s.box)
    payload = app.to_json()
    code = OK
    if app.target is not None:
        tilde = normalize(target_in_source_names(app.target))
        payload["target_label"] = classify(tilde, (), s.sampler).label
    if s.numeric:
        T = AdmissibleTransformation(app.source, app.transform, app.target_pullback, app.target)
        rep = _numeric(T, s)
        payload["numeric"] = rep.to_json()
        code = OK if rep.passed else FAIL
    return CommandResult(code, payload)


def _cmd_prolong(args, s):
    phi = prolong_point(_point_from_args(args))
    contact = check_contact_condition(phi, s.box, s.seed)
    payload = phi.to_json()
    payload["contact"] = contact.to_json()
    return CommandResult(OK if contact.passed else (FAIL if contact.decided else UNDECIDED), payload)


def _cmd_compose(args, s):
    if len(args.bundle) != 2:
        raise UsageError("compose needs exactly two --bundle options")
    first, second = (as_contact(transform_from_json(_read_json(b))) for b in args.bundle)
    try:
        phi = compose(second, first, s.box, s.seed)
    except (ContactConditionViolated, DomainMismatch) as exc:
        return CommandResult(FAIL, {"verdict": type(exc).__name__, "message": str(exc)})
    payload = phi.to_json()
    payload["contact"] = check_contact_condition(phi, s.box, s.seed).to_json()
    return CommandResult(OK, payload)


def _worst(codes) -> int:
    if FAIL in codes:
        return FAIL
    if UNDECIDED in codes:
        return UNDECIDED
    return OK


def _report_code(report) -> int:
    if report.passed:
        return OK
    return FAIL if report.decided else UNDECIDED


def _cmd_verify(args, s):
    data = _read_json(args.bundle)
    has_source = "source" in data
    if has_source:
        T = admissible_from_json(data)
        phi = T.transform
    else:
        T = None
        phi = as_contact(transform_from_json(data))
    run_contact = args.contact or not args.determining
    run_determining = args.determining or (has_source and not args.contact)
    payload = {"transform": phi.to_json()}
    codes = []
    if run_contact:
        rep = check_contact_condition(phi, s.box, s.seed)
        payload["contact"] = rep.to_json()
        codes.append(_report_code(rep))
    if run_determining:
        if T is None:
            raise UsageError("--determining needs a bundle with a 'source' equation")
        rep = verify_determining_system(T, s.box, s.seed)
        payload["determining"] = rep.to_json()
        codes.append(_report_code(rep))
    if s.numeric:
        if T is None:
            raise UsageError("--numeric needs a bundle with a 'source' equation")
        rep = _numeric(T, s, args.mode)
        payload["numeric"] = rep.to_json()
        codes.append(OK if rep.passed else FAIL)
    code = _worst(codes)
    payload["passed"] = code == OK
    return CommandResult(code, payload)


def _cmd_reduce(args, s):
    f = parse(args.f)
    try:
        rec = reconstruct_theta(f, domain=s.domain, convention=args.convention)
    except NotInHxy as exc:
        return CommandResult(FAIL, {"f": render(normalize(f)), "verdict": "NotInHxy", "message": str(exc)})
    except IntegrationFailure as exc:
        return CommandResult(UNDECIDED, {"f": render(normalize(f)), "verdict": "IntegrationFailure", "message": str(exc)})
    payload = rec.to_json()
    payload["convention"] = args.convention
    return CommandResult(OK if rec.verified else UNDECIDED, payload)


def _cmd_darboux(args, s):
    if args.action == "gauge":
        if not args.gauge:
            raise UsageError("gauge needs --gauge")
        datum = DarbouxDatum(args.kind, parse(args.expr), s.domain)
        fn, gauge = (f_from_h, gauge_h) if args.kind == "h" else (f_from_g, gauge_g)
        new = gauge(datum, parse(args.gauge))
        before, after = fn(datum), fn(new)
        from .expr import is_zero

        st = is_zero(normalize(after - before), s.sampler)
        payload = {"datum": datum.to_json(), "gauged": new.to_json(), "f": render(before), "f_gauged": render(after), "difference": st.to_json(), "unchanged": st.proven_zero}
        return CommandResult(OK if st.proven_zero else (FAIL if st.proven_nonzero else UNDECIDED), payload)
    kind = {"f-from-h": "h", "f-from-g": "g", "f-from-theta": "theta"}[args.action]
    datum = DarbouxDatum(kind, parse(args.expr), s.domain)
    if kind == "theta":
        f = f_from_theta(datum, args.convention)
    else:
        f = (f_from_h if kind == "h" else f_from_g)(datum)
    label = classify(f, s.domain, s.sampler).label
    payload = {"datum": datum.to_json(), "f": render(f), "label": label}
    if kind == "theta":
        payload["convention"] = args.convention
    return CommandResult(OK, payload)


def _cmd_hy(args, s):
    inverse = None
    if args.inverse:
        inverse = as_contact(transform_from_json(_read_json(args.inverse)))
    try:
        T = build_Hy_admissible(DarbouxDatum("h", parse(args.h), s.domain), parse(args.upsilon), parse(args.hfun), inverse, s.box, s.seed)
    except ContactConditionViolated as exc:
        return CommandResult(FAIL, {"verdict": "ContactConditionViolated", "message": str(exc)})
    payload = T.to_json()
    payload["determining"] = T.report.to_json()
    payload["source_label"] = classify(T.source, (), s.sampler).label
    if T.target is not None:
        payload["target_label"] = classify(normalize(target_in_source_names(T.target)), (), s.sampler).label
    codes = [_report_code(T.report)]
    if s.numeric:
        rep = _numeric(T, s)
        payload["numeric"] = rep.to_json()
        codes.append(OK if rep.passed else FAIL)
    return CommandResult(_worst(codes), payload)


def _wave_numeric(phi, s):
    from .expr import ZERO

    return _numeric(AdmissibleTransformation(ZERO, phi, ZERO, ZERO), s)


def _cmd_wave(args, s):
    if args.action == "catalog":
        elements = discrete_catalog()
        structure = group_structure(elements)
        items = []
        for e in elements:
            items.append({"name": e.name, "components": {k: render(v) for k, v in e.components.items()}, "verified": verify_wave_symmetry(e).passed})
        code = OK if all(i["verified"] for i in items) else FAIL
        return CommandResult(code, {"elements": items, "group": structure.to_json()})
    if args.action == "verify":
        if not args.bundle:
            raise UsageError("wave-symmetry verify needs --bundle")
        phi = as_contact(transform_from_json(_read_json(args.bundle)))
    else:
        theta1 = parse(args.theta1) if args.theta1 else None
        theta2 = parse(args.theta2) if args.theta2 else None
        try:
            phi = build_wave_symmetry(parse(args.c), parse(args.X), parse(args.Y), parse(args.phi1), parse(args.phi2), theta1, theta2, parse(args.t0), domain=s.domain)
        except InverseMismatch as exc:
            return CommandResult(FAIL, {"verdict": "InverseMismatch", "message": str(exc)})
        except BranchUndetermined as exc:
            return CommandResult(UNDECIDED, {"verdict": "BranchUndetermined", "message": str(exc)})
    report = verify_wave_symmetry(phi, s.box, s.seed)
    payload = {"transform": phi.to_json(), "report": report.to_json()}
    codes = [OK if report.passed else FAIL]
    if s.numeric:
        rep = _wave_numeric(phi, s)
        payload["numeric"] = rep.to_json()
        codes.append(OK if rep.passed else FAIL)
    return CommandResult(_worst(codes), payload)


_BUNDLES = {
    "partial-legendre": lambda: catalog.legendre_wave().to_json(),
    "tampered-legendre": lambda: catalog.tampered_legendre().to_json(),
    "double-legendre": lambda: catalog.double_legendre().to_json(),
    "mismatched": lambda: catalog.mismatched_pair().to_json(),
    "worked-hy": lambda: catalog.worked_Hy().to_json(),
}


def _cmd_catalog(args, s):
    if args.action == "list":
        return CommandResult(OK, {"equations": [{"name": e.name, "f": render(e.f), "label": e.label} for e in catalog.entries()], "bundles": sorted(_BUNDLES)})
    if args.action == "show":
        if not args.name:
            raise UsageError("catalog show needs a name")
        return CommandResult(OK, catalog.get(args.name).to_json())
    if args.action == "bundle":
        if args.name not in _BUNDLES:
            raise UnknownName(f"no worked bundle {args.name!r}; known: {', '.join(sorted(_BUNDLES))}")
        return CommandResult(OK, _BUNDLES[args.name]())
    if args.action == "templates":
        return CommandResult(OK, {"seed": s.seed, "templates": [t.to_json() for t in catalog.point_transform_templates(s.seed, args.n)]})
    return CommandResult(OK, catalog.to_json())


COMMANDS = {
    "classify": _cmd_classify,
    "transform": _cmd_transform,
    "prolong": _cmd_prolong,
    "compose": _cmd_compose,
    "verify": _cmd_verify,
    "reduce-to-wave": _cmd_reduce,
    "darboux": _cmd_darboux,
    "hy-admissible": _cmd_hy,
    "wave-symmetry": _cmd_wave,
    "catalog": _cmd_catalog,
}

_INPUT_ERRORS = (ParseError, UnknownName, DegenerateDatum, DegenerateTransform, NotInCatalog, ValueError, UsageError)


def run(argv, env=None) -> CommandResult:
    """Parse ``argv`` and dispatch to the subcommand."""
    env = os.environ if env is None else env
    argv = list(argv)
    json_mode = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        s = _settings(args, env)
        json_mode = s.json
        result = COMMANDS[args.command](args, s)
    except _INPUT_ERRORS as exc:
        result = CommandResult(USAGE, None, [f"error: {exc}"])
    except (Indeterminate, BranchUndetermined) as exc:
        result = CommandResult(UNDECIDED, {"verdict": type(exc).__name__, "message": str(exc)})
    except HypeqError as exc:
        result = CommandResult(FAIL, {"verdict": type(exc).__name__, "message": str(exc)})
    result.json_mode = json_mode
    return result


def _human(payload, indent=0) -> str:
    lines = []
    pad = " " * indent
    width = max((len(str(k)) for k in payload), default=0)
    for key, value in payload.items():
        if isinstance(value, dict) and value and indent < 4:
            lines.append(f"{pad}{key}:")
            lines.append(_human(value, indent + 2))
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value) and indent < 4:
            lines.append(f"{pad}{key}:")
            for i, item in enumerate(value):
                lines.append(f"{pad}  [{i}]")
                lines.append(_human(item, indent + 4))
        else:
            text = value if isinstance(value, str) else json.dumps(value)
            lines.append(f"{pad}{str(key).ljust(width)} : {text}")
    return "\n".join(lines)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        result = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    if result.payload is not None:
        print(result.render())
    return result.code


if __name__ == "__main__":
    sys.exit(main())
