"""Point and contact transformations of the first jet space."""
from __future__ import annotations

from fractions import Fraction
from dataclasses import dataclass, field, replace as dc_replace
from typing import Callable, Optional

from .errors import (
    ContactConditionViolated,
    DegenerateTransform,
    DomainMismatch,
    EvaluationError,
    NotInCatalog,
    PoleEncountered,
)
from .expr import (
    ONE,
    ZERO,
    Const,
    Expr,
    FreeFunc,
    Func,
    Pow,
    SamplerConfig,
    Var,
    as_expr,
    compile_expr,
    diff,
    is_zero,
    normalize,
    normalize_with_conditions,
    parse,
    rational_form,
    render,
    replace,
    substitute,
)
from .expr.normal import _poly_expr
from .jets import from_tilde, to_tilde, truncated_total_derivative
from .reports import CheckReport, residual_check
from .sampling import DEFAULT_BOX, DEFAULT_SEED, names_of, sample_points

COMPONENTS = ("X", "Y", "U", "Ux", "Uy")
SOURCE = ("x", "y", "u", "ux", "uy")


def parse_domain(entries) -> tuple:
    """Domain inequations from strings such as ``"ux != 0"`` or ``"x + 1"``.

    Every entry becomes an expression required to be nonzero; ``a != b``,
    ``a > b`` and ``a < b`` all contribute ``a - b``.
    """
    out = []
    for entry in entries or ():
        if isinstance(entry, Expr):
            out.append(normalize(entry))
            continue
        text = str(entry).replace("≠", "!=")
        for op in ("!=", ">=", "<=", ">", "<"):
            if op in text:
                lhs, rhs = text.split(op, 1)
                out.append(normalize(parse(lhs) - parse(rhs)))
                break
        else:
            out.append(normalize(parse(text)))
    return tuple(e for e in out if not (e.free_variables == frozenset() and e != ZERO))


def _dedupe(exprs) -> tuple:
    seen = []
    for e in exprs:
        e = normalize(e)
        if isinstance(e, Const):
            continue
        if e not in seen:
            seen.append(e)
    return tuple(seen)


@dataclass(frozen=True)
class ContactTransform:
    """``(x~, y~, u~, u~_x~, u~_y~) = (X, Y, U, Ux, Uy)`` on the first jet space."""

    X: Expr
    Y: Expr
    U: Expr
    Ux: Expr
    Uy: Expr
    domain: tuple = ()
    inverse: Optional["ContactTransform"] = field(default=None, compare=False, repr=False)
    name: str = field(default="", compare=False)
    numeric: Optional[dict] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for c in COMPONENTS:
            object.__setattr__(self, c, as_expr(getattr(self, c)))
        object.__setattr__(self, "domain", tuple(as_expr(d) for d in self.domain))

    @classmethod
    def identity(cls) -> "ContactTransform":
        t = cls(Var("x"), Var("y"), Var("u"), Var("ux"), Var("uy"), name="identity")
        object.__setattr__(t, "inverse", t)
        return t

    @classmethod
    def from_strings(cls, X, Y, U, Ux, Uy, domain=(), name="") -> "ContactTransform":
        return cls(parse(X), parse(Y), parse(U), parse(Ux), parse(Uy), parse_domain(domain), name=name)

    @property
    def components(self) -> dict:
        return {c: getattr(self, c) for c in COMPONENTS}

    def normalized(self) -> "ContactTransform":
        return dc_replace(self, **{c: normalize(getattr(self, c)) for c in COMPONENTS})

    def key(self) -> tuple:
        """Normalized component tuple, used to compare transforms."""
        return tuple(normalize(getattr(self, c)) for c in COMPONENTS)

    @property
    def is_numeric_only(self) -> bool:
        return self.numeric is not None

    def evaluate(self, point) -> tuple:
        """Image of a first-jet point (mapping of source names to floats)."""
        if self.numeric is not None:
            return tuple(self.numeric[c](point) if c in self.numeric else compile_expr(getattr(self, c))(point) for c in COMPONENTS)
        return tuple(compile_expr(getattr(self, c))(point) for c in COMPONENTS)

    def with_inverse(self, inverse: "ContactTransform") -> "ContactTransform":
        return dc_replace(self, inverse=inverse)

    def to_json(self) -> dict:
        out = {
            "kind": "contact",
            "components": {c: render(getattr(self, c)) for c in COMPONENTS},
            "swap": False,
            "domain": [render(d) for d in self.domain],
        }
        if self.inverse is not None and self.inverse is not self:
            out["inverse"] = {"components": {c: render(getattr(self.inverse, c)) for c in COMPONENTS}}
        if self.name:
            out["name"] = self.name
        if self.numeric is not None:
            out["numeric_only"] = sorted(self.numeric)
        return out


@dataclass(frozen=True)
class PointEquivalenceTransform:
    """``x~ = X(x), y~ = Y(y), u~ = U(x, y, u)``, followed by the swap when flagged.

    The swap is the permutation ``(x, ux) <-> (y, uy)`` of the target
    coordinates, applied after the point map.
    """

    X: Expr
    Y: Expr
    U: Expr
    swap: bool = False
    domain: tuple = ()
    name: str = field(default="", compare=False)
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for c in ("X", "Y", "U"):
            object.__setattr__(self, c, as_expr(getattr(self, c)))
        object.__setattr__(self, "domain", tuple(as_expr(d) for d in self.domain))
        for comp, allowed in (("X", {"x"}), ("Y", {"y"}), ("U", {"x", "y", "u"})):
            extra = getattr(self, comp).free_variables - allowed
            if extra:
                raise ValueError(f"{comp} may depend only on {sorted(allowed)}, found {sorted(extra)}")

    @classmethod
    def identity(cls) -> "PointEquivalenceTransform":
        return cls(Var("x"), Var("y"), Var("u"), name="identity")

    @classmethod
    def from_strings(cls, X, Y, U, swap=False, domain=(), name="") -> "PointEquivalenceTransform":
        return cls(parse(X), parse(Y), parse(U), swap, parse_domain(domain), name)

    def nondegeneracy(self, config: SamplerConfig = None):
        """Zero test of ``X_x * Y_y * U_u`` (nondegenerate unless ProvenZero)."""
        jac = normalize(diff(self.X, "x") * diff(self.Y, "y") * diff(self.U, "u"))
        config = config or SamplerConfig(avoid=self.domain)
        return is_zero(jac, config)

    def to_json(self) -> dict:
        out = {
            "kind": "point",
            "components": {"X": render(self.X), "Y": render(self.Y), "U": render(self.U)},
            "swap": self.swap,
            "domain": [render(d) for d in self.domain],
        }
        if self.name:
            out["name"] = self.name
        return out


def swap_transform() -> ContactTransform:
    """The discrete transformation exchanging ``(x, ux)`` and ``(y, uy)``."""
    t = ContactTransform(Var("y"), Var("x"), Var("u"), Var("uy"), Var("ux"), name="swap")
    object.__setattr__(t, "inverse", t)
    return t


# ---------------------------------------------------------------- prolongation


def prolong_point(P: PointEquivalenceTransform) -> ContactTransform:
    """First prolongation ``Ux = (U_x + U_u ux)/X_x``, ``Uy = (U_y + U_u uy)/Y_y``."""
    Xx = normalize(diff(P.X, "x"))
    Yy = normalize(diff(P.Y, "y"))
    Uu = normalize(diff(P.U, "u"))
    if P.nondegeneracy().proven_zero:
        raise DegenerateTransform(f"X_x*Y_y*U_u vanishes identically for {render(P.X)}, {render(P.Y)}, {render(P.U)}")
    ux, uy = Var("ux"), Var("uy")
    Ux, c1 = normalize_with_conditions((diff(P.U, "x") + diff(P.U, "u") * ux) / Xx)
    Uy, c2 = normalize_with_conditions((diff(P.U, "y") + diff(P.U, "u") * uy) / Yy)
    domain = _dedupe(P.domain + (Xx, Yy, Uu) + c1 + c2)
    X, Y, U = normalize(P.X), normalize(P.Y), normalize(P.U)
    if P.swap:
        X, Y, Ux, Uy = Y, X, Uy, Ux
    return ContactTransform(X, Y, U, Ux, Uy, domain, name=P.name)


# ---------------------------------------------------------------- checks


def contact_residuals(phi: ContactTransform) -> dict:
    """The four split contact equations as residual expressions."""
    X, Y, U, Ux, Uy = (phi.X, phi.Y, phi.U, phi.Ux, phi.Uy)
    out = {}
    for var, axis in (("ux", "x"), ("uy", "y")):
        out[f"d_{var}"] = normalize(Ux * diff(X, var) + Uy * diff(Y, var) - diff(U, var))
        DX = truncated_total_derivative(X, axis)
        DY = truncated_total_derivative(Y, axis)
        DU = truncated_total_derivative(U, axis)
        out[f"D{axis}"] = normalize(Ux * DX + Uy * DY - DU)
    return {k: out[k] for k in ("d_ux", "Dx", "d_uy", "Dy")}


def check_contact_condition(phi: ContactTransform, box=None, seed: int = None, n_numeric: int = 64) -> CheckReport:
    """Zero-test the four contact equations; sampled maxima back up Unknown verdicts."""
    if phi.is_numeric_only:
        return _numeric_contact_check(phi, box, seed, n_numeric)
    checks = tuple(
        residual_check(name, r, phi.domain, n_numeric, box, seed) for name, r in contact_residuals(phi).items()
    )
    return CheckReport("contact", checks)


def _numeric_contact_check(phi, box, seed, n):
    # components built by quadrature: compare the equations by complex-free
    # central differences of the numeric components
    from .reports import ResidualCheck
    from .expr.zero import ZeroStatus, UNKNOWN

    box = box or DEFAULT_BOX
    seed = DEFAULT_SEED if seed is None else seed
    points = sample_points(SOURCE, n, box, seed, avoid=phi.domain)
    h = 1e-5
    worst = {k: 0.0 for k in ("d_ux", "Dx", "d_uy", "Dy")}
    for p in points:
        base = phi.evaluate(p)
        Ux, Uy = base[3], base[4]

        def d(var):
            hi = dict(p)
            lo = dict(p)
            hi[var] += h
            lo[var] -= h
            a, b = phi.evaluate(hi), phi.evaluate(lo)
            return [(ai - bi) / (2 * h) for ai, bi in zip(a, b)]

        dx, dy, du, dux, duy = (d(v) for v in SOURCE)
        for var, dv, axis, dax, jet in (("ux", dux, "x", dx, p["ux"]), ("uy", duy, "y", dy, p["uy"])):
            worst[f"d_{var}"] = max(worst[f"d_{var}"], abs(Ux * dv[0] + Uy * dv[1] - dv[2]))
            D = [dax[i] + jet * du[i] for i in range(3)]
            worst[f"D{axis}"] = max(worst[f"D{axis}"], abs(Ux * D[0] + Uy * D[1] - D[2]))
    checks = tuple(ResidualCheck(k, ZERO, ZeroStatus(UNKNOWN), v, 1e-6) for k, v in worst.items())
    return CheckReport("contact", checks, ("numeric-only transform: finite-difference check at tolerance 1e-6",))


def jacobian_matrix(phi: ContactTransform) -> list:
    return [[normalize(diff(getattr(phi, c), v)) for v in SOURCE] for c in COMPONENTS]


def determinant(matrix) -> Expr:
    """Exact determinant by Laplace expansion over column subsets (memoized)."""
    n = len(matrix)
    memo = {}

    def minor(row, cols):
        if row == n:
            return ONE
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = ZERO
        sign = 1
        for j in cols:
            entry = matrix[row][j]
            if entry != ZERO:
                rest = minor(row + 1, tuple(c for c in cols if c != j))
                if rest != ZERO:
                    term = entry * rest
                    total = total + term if sign > 0 else total - term
            sign = -sign
        total = normalize(total)
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def jacobian_determinant(phi: ContactTransform) -> Expr:
    return determinant(jacobian_matrix(phi))


def jacobian_nondegenerate(phi: ContactTransform, samples: int = 64, box=None, seed: int = None):
    """Zero status of the 5x5 Jacobian determinant (degenerate iff ProvenZero)."""
    det = jacobian_determinant(phi)
    config = SamplerConfig(n=samples, box=tuple(box or DEFAULT_BOX), seed=DEFAULT_SEED if seed is None else seed, avoid=phi.domain)
    return is_zero(det, config)


# ---------------------------------------------------------------- composition


def compose(phi2: ContactTransform, phi1: ContactTransform, box=None, seed: int = None, verify: bool = True, with_inverse: bool = True) -> ContactTransform:
    """``phi2 o phi1``: substitute phi1's components into phi2's source variables."""
    if phi1.is_numeric_only or phi2.is_numeric_only:
        raise ValueError("numeric-only transforms cannot be composed symbolically")
    bind = dict(zip(SOURCE, (phi1.X, phi1.Y, phi1.U, phi1.Ux, phi1.Uy)))
    comps = []
    extra = []
    for c in COMPONENTS:
        value, conds = normalize_with_conditions(replace(getattr(phi2, c), bind))
        comps.append(value)
        extra.extend(conds)
    pulled = [substitute(d, bind) for d in phi2.domain]
    _check_domains(pulled, phi1.domain, box, seed)
    domain = _dedupe(phi1.domain + tuple(pulled) + tuple(extra))
    inverse = None
    if with_inverse and phi1.inverse is not None and phi2.inverse is not None:
        inverse = compose(phi1.inverse, phi2.inverse, box, seed, verify=False, with_inverse=False)
    name = f"{phi2.name}*{phi1.name}" if phi1.name and phi2.name else ""
    out = ContactTransform(*comps, domain=domain, inverse=inverse, name=name)
    if verify:
        report = check_contact_condition(out, box, seed)
        if any(c.status.proven_nonzero for c in report.checks):
            raise ContactConditionViolated(f"composition violates the contact condition: {[c.name for c in report.failures()]}")
    return out


def _check_domains(pulled, domain1, box, seed):
    if not pulled:
        return
    names = names_of(*pulled, *domain1) or ["x"]
    try:
        points = sample_points(names, 32, box or DEFAULT_BOX, DEFAULT_SEED if seed is None else seed, avoid=domain1, max_attempts=50)
    except PoleEncountered:
        return
    fns = [compile_expr(d) for d in pulled]
    ok = 0
    for p in points:
        try:
            if all(abs(f(p)) > 1e-9 for f in fns):
                ok += 1
        except EvaluationError:
            continue
    if ok == 0:
        raise DomainMismatch("the image of the first transform never meets the domain of the second at the sampled points")


# ---------------------------------------------------------------- inversion


_W = Var("__w")


def invert_scalar(e: Expr, v: str, target: Expr = _W):
    """Solve ``e(v) = target`` for ``v`` within the inversion catalog.

    Returns ``(solution, domain_notes)``.  The catalog: Moebius functions of a
    single ``v``-dependent generator, odd integer powers of it (with an affine
    outer layer), and the generators ``v``, ``exp``, ``ln`` and rational roots,
    peeled recursively.
    """
    e = normalize(e)
    notes = []
    sol = _invert(e, v, target, notes, 0)
    return normalize(sol), tuple(notes)


def _vfree(e, v):
    return v not in e.free_variables


def _invert(e, v, w, notes, depth):
    if depth > 12:
        raise NotInCatalog("inversion nests too deeply")
    if e == Var(v):
        return w
    rf = rational_form(e)
    dep = [i for i, g in enumerate(rf.gens) if not _vfree(g, v)]
    if len(dep) != 1:
        raise NotInCatalog(f"{render(e)} is not a function of a single catalog generator in {v}")
    i = dep[0]
    G = rf.gens[i]
    num_deg = {m[i] for m, _ in rf.num}
    den_deg = {m[i] for m, _ in rf.den}

    def part(terms, k):
        sel = tuple((m[:i] + (0,) + m[i + 1 :], c) for m, c in terms if m[i] == k)
        return normalize(_poly_expr(rf.gens, sel)) if sel else ZERO

    if num_deg | den_deg <= {0, 1}:
        a, b = part(rf.num, 1), part(rf.num, 0)
        c, d = part(rf.den, 1), part(rf.den, 0)
        det = normalize(a * d - b * c)
        if det == ZERO:
            raise NotInCatalog(f"{render(e)} is constant in {render(G)}")
        rhs = normalize((d * w - b) / (a - c * w))
    elif den_deg == {0} and len(num_deg - {0}) == 1:
        (n,) = num_deg - {0}
        if n % 2 == 0:
            raise NotInCatalog(f"{render(e)} has an even power of {render(G)} and no unique inverse")
        a, b = part(rf.num, n), part(rf.num, 0)
        den = part(rf.den, 0)
        rhs = Pow(normalize((w * den - b) / a), Fraction(1, n))
    else:
        raise NotInCatalog(f"{render(e)} is not in the inversion catalog")
    return _peel(G, v, rhs, notes, depth)


def _peel(G, v, rhs, notes, depth):
    if G == Var(v):
        return rhs
    if isinstance(G, Func) and G.name == "exp":
        notes.append(f"{render(rhs)} > 0")
        return _invert(normalize(G.arg), v, Func("ln", rhs), notes, depth + 1)
    if isinstance(G, Func) and G.name == "ln":
        return _invert(normalize(G.arg), v, Func("exp", rhs), notes, depth + 1)
    if isinstance(G, Pow) and G.exponent.denominator != 1:
        q = G.exponent.denominator
        if q % 2 == 0:
            notes.append(f"{render(rhs)} >= 0")
        return _invert(normalize(G.base), v, Pow(rhs, q * G.exponent.numerator), notes, depth + 1)
    raise NotInCatalog(f"generator {render(G)} is not in the inversion catalog")


def invert_point(P: PointEquivalenceTransform) -> PointEquivalenceTransform:
    """Closed-form inverse of a point transform, or :class:`NotInCatalog`.

    The inverse is expressed in plain variable names (``x`` standing for
    ``x~`` and so on); domain restrictions met while peeling generators
    (such as ``u > 0`` for a logarithm) are kept in ``notes``.
    """
    xinv, n1 = invert_scalar(P.X, "x", Var("x"))
    yinv, n2 = invert_scalar(P.Y, "y", Var("y"))
    # U(X^-1(x), Y^-1(y), s) = u solved for s; rename u to a placeholder first
    Ubar = replace(P.U, {"u": Var("__s"), "x": xinv, "y": yinv})
    uinv, n3 = invert_scalar(normalize(Ubar), "__s", Var("u"))
    notes = tuple(dict.fromkeys(n1 + n2 + n3))
    if not P.swap:
        inv = PointEquivalenceTransform(xinv, yinv, uinv, False, (), f"{P.name}^-1" if P.name else "", notes)
    else:
        # (swap o P)^-1 = P^-1 o swap = swap o (swap P^-1 swap)
        xy = {"x": Var("y"), "y": Var("x")}
        inv = PointEquivalenceTransform(replace(yinv, {"y": Var("x")}), replace(xinv, {"x": Var("y")}), replace(uinv, xy), True, (), f"{P.name}^-1" if P.name else "", notes)
    return inv


# ---------------------------------------------------------------- point equivalence action


def pullback_target_point(P: PointEquivalenceTransform, f) -> Expr:
    """Right side of the point-equivalence formula, in source variables."""
    f = as_expr(f)
    U = P.U
    Uu = diff(U, "u")
    ux, uy = Var("ux"), Var("uy")
    num = Uu * f + diff(U, "x", "y") + diff(U, "x", "u") * uy + diff(U, "y", "u") * ux + diff(U, "u", "u") * ux * uy
    return normalize(num / (diff(P.X, "x") * diff(P.Y, "y")))


@dataclass
class NumericPointInverse:
    """Bisection-then-Newton inverse of a point transform on a bracket."""

    P: PointEquivalenceTransform
    bracket: tuple = DEFAULT_BOX
    tol: float = 1e-12

    def _solve(self, fn, dfn, target, lo, hi):
        flo, fhi = fn(lo) - target, fn(hi) - target
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if flo * fhi > 0:
            raise EvaluationError(f"no sign change on [{lo}, {hi}] for target {target}")
        for _ in range(60):
            mid = (lo + hi) / 2
            fm = fn(mid) - target
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
            if hi - lo < 1e-6:
                break
        s = (lo + hi) / 2
        for _ in range(50):
            step = (fn(s) - target) / dfn(s)
            s -= step
            if abs(step) < self.tol * max(1.0, abs(s)):
                break
        return s

    def source_point(self, tilde: dict) -> dict:
        """Source first jet mapped to the given tilde first jet."""
        P = self.P
        tx, ty, tu, tux, tuy = (tilde[k] for k in ("tx", "ty", "tu", "tux", "tuy"))
        if P.swap:
            tx, ty, tux, tuy = ty, tx, tuy, tux
        lo, hi = self.bracket
        X, dX = compile_expr(P.X), compile_expr(normalize(diff(P.X, "x")))
        Y, dY = compile_expr(P.Y), compile_expr(normalize(diff(P.Y, "y")))
        x = self._solve(lambda s: X({"x": s}), lambda s: dX({"x": s}), tx, lo, hi)
        y = self._solve(lambda s: Y({"y": s}), lambda s: dY({"y": s}), ty, lo, hi)
        U, dU = compile_expr(P.U), compile_expr(normalize(diff(P.U, "u")))
        base = {"x": x, "y": y}
        u = self._solve(lambda s: U({**base, "u": s}), lambda s: dU({**base, "u": s}), tu, lo, hi)
        p = {"x": x, "y": y, "u": u}
        Ux = compile_expr(normalize(diff(P.U, "x")))(p)
        Uy = compile_expr(normalize(diff(P.U, "y")))(p)
        Uu = dU(p)
        p["ux"] = (tux * dX({"x": x}) - Ux) / Uu
        p["uy"] = (tuy * dY({"y": y}) - Uy) / Uu
        return p


@dataclass
class PointApplication:
    """Result of acting with a point transform on ``u_xy = f``."""

    source: Expr
    transform: ContactTransform
    target_pullback: Expr
    target: Optional[Expr]
    inverse: Optional[PointEquivalenceTransform] = None
    numeric_inverse: Optional[NumericPointInverse] = None
    domain_notes: tuple = ()

    @property
    def implicit(self) -> bool:
        return self.target is None

    def target_at(self, tilde: dict) -> float:
        """Numeric value of the target arbitrary element at a tilde first jet."""
        if self.target is not None:
            return compile_expr(self.target)(tilde)
        source = self.numeric_inverse.source_point(tilde)
        return compile_expr(self.target_pullback)(source)

    def to_json(self) -> dict:
        return {
            "source": render(self.source),
            "target_pullback": render(self.target_pullback),
            "target": render(self.target) if self.target is not None else "Implicit",
            "transform": self.transform.to_json(),
            "domain_notes": list(self.domain_notes),
        }


def apply_point_equivalence(P: PointEquivalenceTransform, f, bracket=DEFAULT_BOX) -> PointApplication:
    """Transform ``u_xy = f`` by ``P``: pullback always, tilde form when invertible."""
    f = normalize(as_expr(f))
    phi = prolong_point(P)
    pull = pullback_target_point(P, f)
    try:
        inv = invert_point(P)
    except NotInCatalog:
        return PointApplication(f, phi, pull, None, None, NumericPointInverse(P, tuple(bracket)))
    q = prolong_point(inv)
    bind = {s: to_tilde(getattr(q, c)) for s, c in zip(SOURCE, COMPONENTS)}
    target = substitute(pull, bind)
    inverse_phi = ContactTransform(*(getattr(q, c) for c in COMPONENTS), domain=q.domain)
    phi = phi.with_inverse(inverse_phi)
    return PointApplication(f, phi, pull, target, inv, None, inv.notes)


def target_in_source_names(target: Expr) -> Expr:
    """Rename a tilde-variable target to plain names for classification."""
    return from_tilde(target)


# ---------------------------------------------------------------- JSON bundles


def transform_from_json(data: dict):
    """Build a transform from a bundle dictionary."""
    kind = data.get("kind", "contact")
    comps = data.get("components") or {}
    domain = parse_domain(data.get("domain", ()))
    swap = bool(data.get("swap", False))
    if kind == "point":
        return PointEquivalenceTransform(parse(comps["X"]), parse(comps["Y"]), parse(comps["U"]), swap, domain, data.get("name", ""))
    if kind != "contact":
        raise ValueError(f"unknown transform kind {kind!r}")
    missing = [c for c in COMPONENTS if c not in comps]
    if missing:
        raise ValueError(f"contact bundle lacks components {missing}")
    phi = ContactTransform(*(parse(comps[c]) for c in COMPONENTS), domain=domain, name=data.get("name", ""))
    if swap:
        phi = compose(swap_transform(), phi, verify=False)
    inv = data.get("inverse")
    if inv:
        ic = inv.get("components", inv)
        phi = phi.with_inverse(ContactTransform(*(parse(ic[c]) for c in COMPONENTS)))
    return phi


def as_contact(t) -> ContactTransform:
    if isinstance(t, PointEquivalenceTransform):
        return prolong_point(t)
    return t


@dataclass
class AdmissibleTransformation:
    """A triple (source ``f``, transform, target) with the target kept as a pullback.

    ``target`` is the target arbitrary element in tilde variables when it is
    known in closed form and ``None`` (implicit) otherwise; ``target_pullback``
    is always the target composed with the transform, in source variables.
    """

    source: Expr
    transform: ContactTransform
    target_pullback: Expr
    target: Optional[Expr] = None
    report: Optional[object] = None
    domain_notes: tuple = ()

    @property
    def implicit(self) -> bool:
        return self.target is None

    def to_json(self) -> dict:
        out = self.transform.to_json()
        out["source"] = render(self.source)
        out["target_pullback"] = render(self.target_pullback)
        out["target"] = render(self.target) if self.target is not None else "Implicit"
        return out


def target_from_inverse(pullback: Expr, inverse: ContactTransform) -> Expr:
    """Re-express a pullback in tilde variables through a known inverse transform."""
    bind = {s: to_tilde(getattr(inverse, c)) for s, c in zip(SOURCE, COMPONENTS)}
    return substitute(pullback, bind)


def admissible_from_json(data: dict) -> AdmissibleTransformation:
    """Bundle with ``source`` and ``target``/``target_pullback`` keys."""
    t = as_contact(transform_from_json(data))
    source = parse(data.get("source", "0"))
    target = data.get("target")
    target = None if target in (None, "Implicit") else parse(target)
    pull = data.get("target_pullback")
    if pull is not None:
        pull = parse(pull)
    elif target is not None:
        pull = substitute(target, {tv: getattr(t, c) for tv, c in zip(("tx", "ty", "tu", "tux", "tuy"), COMPONENTS)})
    else:
        from .darboux import induced_target

        pull = induced_target(t, source)
    return AdmissibleTransformation(normalize(source), t, normalize(pull), target)
