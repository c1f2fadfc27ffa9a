"""Named verification checks, one or more per acceptance item.

Every check takes a ``Context`` (scenario plus lazily built objects) and
returns a list of ``CheckResult``.  Checks that exercise a fixed family
(the star tables, the Lorenz families, the seeded Dirac family, ...) ignore
the scenario's connection; the others use it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import instantons as inst
from .algebra import TraceKind, adjoint as madj
from .coefficients import ExactCoefficient, constant, fd_wirtinger, poly, radial_term
from .forms import FormField, FormValue, basis, basis_index, parse_basis
from .hodge import (
    EUCLIDEAN,
    MINKOWSKI,
    DualityClass,
    QuadratureSpec,
    build_star_table,
    classify_duality,
    get_metric,
    global_inner,
    star,
)
from .scenario import CheckResult, Scenario, build_connection, eta_from_params
from .variational import (
    ProfileParam,
    bump_radial,
    directional_derivative,
    eb_inner,
    extract_eb,
    optimize_profile,
    random_bump_direction,
)
from .yang_mills import (
    Connection,
    covariant_costar,
    covariant_d,
    curvature,
    current,
    lorenz_residual,
    sample_points,
    sample_points_shell,
    ym_residuals,
)

__all__ = ["Context", "CHECKS", "run_check", "run_checks", "DIRAC_B1", "DIRAC_B2"]

DIRAC_B1 = np.array([[-1, 1], [-1j, -1j]], dtype=complex)
DIRAC_B2 = np.array([[1, -1j], [-1, -1j]], dtype=complex)


@dataclass
class Context:
    scenario: Scenario
    tolerance: float | None = None
    _cache: dict = field(default_factory=dict)

    @property
    def metric(self):
        return get_metric(self.scenario.metric)

    @property
    def trace(self) -> TraceKind:
        return self.scenario.trace

    def tol(self, default: float) -> float:
        if self.tolerance is not None:
            return self.tolerance
        if self.scenario.tolerance is not None:
            return self.scenario.tolerance
        return default

    def _built(self):
        if "built" not in self._cache:
            self._cache["built"] = build_connection(self.scenario)
        return self._cache["built"]

    @property
    def connection(self) -> Connection | None:
        return self._built()[0]

    @property
    def family(self):
        return self._built()[1]

    def points(self):
        sc = self.scenario
        if sc.builtin == "bpst":
            return sample_points_shell(sc.points, sc.seed)
        return sample_points(sc.points, sc.seed, sc.sample_radius)

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.scenario.seed, salt])


def _res(name, worst, tol, pts, detail="", ok=None) -> CheckResult:
    worst = float(worst)
    if ok is None:
        ok = bool(np.isfinite(worst) and worst <= tol)
    return CheckResult(name, "pass" if ok else "fail", worst, tol, int(pts), detail)


def _info(name, detail, pts=0, worst=None) -> CheckResult:
    return CheckResult(name, "info", worst, None, pts, detail)


def _maxabs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def _random_poly_connection(rng, dim=2, degree=2, terms=4) -> Connection:
    def comp():
        out = []
        for _ in range(terms):
            pw = rng.integers(0, degree + 1, size=4)
            while pw.sum() > degree:
                pw = rng.integers(0, degree + 1, size=4)
            out.append((tuple(int(x) for x in pw), rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))))
        return poly(out)

    return Connection(*(comp() for _ in range(4)))


def _exact_connection(ctx: Context, salt: int) -> tuple:
    """The scenario's connection when its coefficients are exact, else a seeded polynomial one."""
    A = ctx.connection
    if A is not None and all(isinstance(c, ExactCoefficient) for c in A.components()):
        return A, ctx.scenario.builtin
    return _random_poly_connection(ctx.rng(salt), ctx.scenario.dim), "seeded polynomial"


# ---------------------------------------------------------------------------
# star tables


def _form(spec: dict, p: int) -> np.ndarray:
    v = np.zeros(len(basis(p)), dtype=complex)
    for name, c in spec.items():
        v[basis_index(parse_basis(name))] += c
    return v


# displayed duals: {source basis: {image basis: coefficient}}
STAR_DISPLAYS = {
    "euclidean": {
        1: {
            "dz1": {"dz1^dz2^dzb2": 0.5},
            "dz2": {"dz1^dz2^dzb1": -0.5},
            "dzb1": {"dz2^dzb1^dzb2": 0.5},
            "dzb2": {"dz1^dzb1^dzb2": -0.5},
        },
        2: {
            "dz1^dz2": {"dz1^dz2": 1},
            "dzb1^dzb2": {"dzb1^dzb2": 1},
            "dz2^dzb2": {"dz1^dzb1": 1},
            "dz1^dzb1": {"dz2^dzb2": 1},
            "dz1^dzb2": {"dz1^dzb2": -1},
            "dz2^dzb1": {"dz2^dzb1": -1},
        },
    },
    "minkowski": {
        1: {
            "dz1": {"dz2^dzb1^dzb2": 0.5},
            "dz2": {"dz1^dz2^dzb1": 0.5},
            "dzb1": {"dz1^dz2^dzb2": 0.5},
            "dzb2": {"dz1^dzb1^dzb2": 0.5},
        },
        2: {
            "dz2^dzb1": {"dz1^dz2": 1},
            "dz1^dzb2": {"dzb1^dzb2": -1},
            "dz2^dzb2": {"dz1^dzb1": 1},
            "dz1^dzb1": {"dz2^dzb2": -1},
            "dzb1^dzb2": {"dz1^dzb2": 1},
            "dz1^dz2": {"dz2^dzb1": -1},
        },
        4: {"dz1^dz2^dzb1^dzb2": {"": -4}},
    },
}

EIGENBASES = {
    "euclidean": {
        1: [{"dz1^dz2": 1}, {"dzb1^dzb2": 1}, {"dz1^dzb1": 1, "dz2^dzb2": 1}],
        -1: [{"dz1^dzb2": 1}, {"dz2^dzb1": 1}, {"dz1^dzb1": 1, "dz2^dzb2": -1}],
    },
    "minkowski": {
        1j: [{"dz1^dz2": 1, "dz2^dzb1": 1j}, {"dz1^dzb1": 1, "dz2^dzb2": 1j}, {"dz1^dzb2": 1, "dzb1^dzb2": 1j}],
        -1j: [{"dz1^dz2": 1, "dz2^dzb1": -1j}, {"dz1^dzb1": 1, "dz2^dzb2": -1j},
              {"dz1^dzb2": 1, "dzb1^dzb2": -1j}],
    },
}


def check_star_table(ctx: Context):
    tol = ctx.tol(1e-12)
    out = []
    for mname in ("euclidean", "minkowski"):
        t = build_star_table(mname).tables
        worst = 0.0
        for p, table in STAR_DISPLAYS[mname].items():
            for src, img in table.items():
                src_v = np.zeros(len(basis(p)), dtype=complex)
                src_v[basis_index(parse_basis(src) if src else ())] = 1
                expect = np.zeros(len(basis(4 - p)), dtype=complex)
                for b, c in img.items():
                    expect[basis_index(parse_basis(b) if b else ())] += c
                worst = max(worst, _maxabs(t[p] @ src_v - expect))
        out.append(_res(f"star-table/{mname}-displays", worst, tol, 0))
        worst = 0.0
        for lam, vecs in EIGENBASES[mname].items():
            for spec in vecs:
                v = _form(spec, 2)
                worst = max(worst, _maxabs(t[2] @ v - lam * v))
        out.append(_res(f"star-table/{mname}-eigenbases", worst, tol, 0))
    return out


def check_involution(ctx: Context):
    tol = ctx.tol(1e-12)
    out = []
    for m in (EUCLIDEAN, MINKOWSKI):
        t = build_star_table(m).tables
        extra = 0 if m is EUCLIDEAN else 1
        worst = 0.0
        for p in range(5):
            sign = (-1) ** (p * (4 - p) + extra)
            worst = max(worst, _maxabs(t[4 - p] @ t[p] - sign * np.eye(len(basis(p)))))
        out.append(_res(f"involution/{m.name}-star-star", worst, tol, 0))
        rng = ctx.rng(2)
        worst = 0.0
        for p in range(5):
            for _ in range(50):
                shape = (len(basis(p)), 2, 2)
                eta = FormValue(p, rng.normal(size=shape) + 1j * rng.normal(size=shape))
                a = star(eta, m).adjoint().data
                b = star(eta.adjoint(), m).data
                worst = max(worst, _maxabs(a - b) / max(1.0, _maxabs(a)))
        out.append(_res(f"involution/{m.name}-star-adjoint", worst, tol, 250))
    return out


# ---------------------------------------------------------------------------
# adjointness of D_A and D_A^*


def _bump_field(rng, p: int, dim: int, radius: float) -> FormField:
    bump = radial_term(bump_radial(radius), np.eye(dim))
    coeffs = {}
    for b in basis(p):
        terms = [((0, 0, 0, 0), rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))]
        k = int(rng.integers(0, 4))
        pw = [0, 0, 0, 0]
        pw[k] = 1
        terms.append((tuple(pw), 0.5 * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))))
        coeffs[b] = poly(terms) @ bump
    return FormField(p, dim, coeffs)


def check_adjointness(ctx: Context):
    tol = ctx.tol(1e-3)
    quad = ctx.scenario.quadrature
    kind = ctx.trace
    dim = ctx.scenario.dim
    rng = ctx.rng(3)
    A = _random_poly_connection(rng, dim, degree=1, terms=2)
    out = []
    for m in (EUCLIDEAN, MINKOWSKI):
        worst_ratio = 0.0
        worst_gap = 0.0
        for i in range(10):
            p = i % 3
            alpha = _bump_field(rng, p, dim, quad.radius)
            beta = _bump_field(rng, p + 1, dim, quad.radius)
            lhs = global_inner(covariant_d(A, alpha), beta, m, quad, kind)
            rhs = global_inner(alpha, covariant_costar(A, beta, m), m, quad, kind)
            na = np.sqrt(abs(global_inner(alpha, alpha, EUCLIDEAN, quad, kind)))
            nb = np.sqrt(abs(global_inner(beta, beta, EUCLIDEAN, quad, kind)))
            bound = tol * (na * nb + 1)
            gap = abs(lhs - rhs)
            if gap / bound > worst_ratio:
                worst_ratio, worst_gap = gap / bound, gap
        out.append(_res(f"adjointness/{m.name}", worst_ratio * tol, tol, 10,
                        f"worst |gap| {worst_gap:.3g}; reported as tol * gap / bound"))
    return out


# ---------------------------------------------------------------------------
# curvature, currents, Bianchi


def check_curvature_crosscheck(ctx: Context):
    tol = ctx.tol(1e-12)
    A, src = _exact_connection(ctx, 4)
    z1, z2 = ctx.points()
    g = curvature(A, "generic")(z1, z2).data
    c = curvature(A, "components")(z1, z2).data
    return [_res("curvature-crosscheck", _maxabs(g - c) / max(1.0, _maxabs(g)), tol, z1.size,
                 f"relative to max |F|; connection: {src}")]


def check_current_crosscheck(ctx: Context):
    tol = ctx.tol(1e-12)
    A, src = _exact_connection(ctx, 4)
    z1, z2 = ctx.points()
    out = []
    for m in (EUCLIDEAN, MINKOWSKI):
        g = current(A, m, "generic").form(z1, z2).data
        c = current(A, m, "closed-form").form(z1, z2).data
        out.append(_res(f"current-crosscheck/{m.name}", _maxabs(g - c) / max(1.0, _maxabs(g)), tol, z1.size,
                        f"relative to max |J|; connection: {src}"))
    return out


def check_bianchi(ctx: Context):
    tol = ctx.tol(1e-10)
    A, src = _exact_connection(ctx, 4)
    z1, z2 = ctx.points()
    b, _ = ym_residuals(A, None, ctx.metric, z1, z2)
    return [_res("bianchi", np.max(b), tol, z1.size, f"max ||D_A F_A||; connection: {src}")]


def check_vacuum(ctx: Context):
    tol = ctx.tol(1e-6)
    A = ctx.connection
    if A is None:
        return [_info("vacuum", "scenario has no connection")]
    z1, z2 = ctx.points()
    b, j = ym_residuals(A, None, ctx.metric, z1, z2)
    F = curvature(A)(z1, z2)
    return [_res("vacuum", max(np.max(b), np.max(j)), tol, z1.size,
                 f"max ||D_A F_A||, ||D_A^* F_A||; max ||F|| {np.max(F.norm()):.3g}")]


def _expected_duality(ctx: Context):
    name, m = ctx.scenario.builtin, ctx.metric.name
    if name in ("bpst", "dirac-monopole") and m == "euclidean":
        return DualityClass.ASD
    if name == "nilpotent-minkowski-sd" and m == "minkowski":
        return DualityClass.SD
    if name == "eta-potential" and m == "minkowski":
        return DualityClass.MIXED
    return None


def check_duality(ctx: Context):
    A = ctx.connection
    if A is None:
        return [_info("duality", "scenario has no connection")]
    z1, z2 = ctx.points()
    tol = ctx.tol(1e-10)
    got = classify_duality(curvature(A)(z1, z2), ctx.metric, tol)
    want = _expected_duality(ctx)
    if want is None:
        return [_info("duality", f"{ctx.metric.name}: {got.value}", z1.size)]
    return [_res("duality", 0.0 if got is want else 1.0, tol, z1.size,
                 f"{ctx.metric.name}: {got.value}, expected {want.value}", ok=got is want)]


# ---------------------------------------------------------------------------
# Lorenz gauge families


def _unitary(rng, n):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q


def lorenz_euclidean_family(rng, n=2) -> Connection:
    """Normal, holomorphic A1, A2 and conjugate-holomorphic A1b, A2b (simultaneously diagonal)."""
    U, V = _unitary(rng, n), _unitary(rng, n)

    def diag_poly(W, holo):
        terms = []
        for pw in ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1)):
            d = np.diag(rng.normal(size=n) + 1j * rng.normal(size=n))
            p4 = (pw[0], pw[1], 0, 0) if holo else (0, 0, pw[0], pw[1])
            terms.append((p4, W @ d @ W.conj().T))
        return poly(terms)

    return Connection(diag_poly(U, True), diag_poly(U, True), diag_poly(V, False), diag_poly(V, False))


def lorenz_minkowski_family(rng, n=2) -> Connection:
    """A1 = d2 Phi, A2 = (d1 Phi)^*, A_jb = A_j^* for a random polynomial Phi.

    Then d1 A1 = d1 d2 Phi = d2 A2^*.
    """
    terms = []
    for _ in range(5):
        pw = rng.integers(0, 3, size=4)
        terms.append((tuple(int(x) for x in pw), rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))))
    phi = poly(terms)
    A1 = phi.wirtinger(1)
    A2 = phi.wirtinger(0).adjoint()
    return Connection(A1, A2, A1.adjoint(), A2.adjoint())


def check_lorenz_families(ctx: Context):
    tol = ctx.tol(1e-12)
    z1, z2 = sample_points(100, ctx.scenario.seed)
    out = []
    worst = 0.0
    for i in range(5):
        A = lorenz_euclidean_family(ctx.rng(50 + i))
        worst = max(worst, _maxabs(lorenz_residual(A, EUCLIDEAN)(z1, z2)))
    out.append(_res("lorenz-families/euclidean-normal-holomorphic", worst, tol, z1.size))
    worst = premise = 0.0
    for i in range(5):
        A = lorenz_minkowski_family(ctx.rng(60 + i))
        worst = max(worst, _maxabs(lorenz_residual(A, MINKOWSKI)(z1, z2)))
        # premise d1 A1 - d2 A2^* = 0, by finite differences of the evaluated coefficients
        a2s = A.A2.adjoint()
        gap = fd_wirtinger(A.A1, z1, z2, 0, richardson=True) - fd_wirtinger(a2s, z1, z2, 1, richardson=True)
        premise = max(premise, _maxabs(gap) / max(1.0, _maxabs(fd_wirtinger(A.A1, z1, z2, 0))))
    out.append(_res("lorenz-families/minkowski-adjoint-pairs", worst, tol, z1.size))
    out.append(_res("lorenz-families/minkowski-premise", premise, 1e-6, z1.size,
                    "d1 A1 - d2 A2^* by finite differences, relative"))
    return out


# ---------------------------------------------------------------------------
# Example with the Minkowski self-dual condition


def _eta_of(ctx: Context) -> inst.EtaForm:
    if ctx.scenario.builtin != "eta-potential":
        return inst.eta_potential_form()
    return eta_from_params(ctx.scenario.params)


def check_sd(ctx: Context):
    tol = ctx.tol(1e-12)
    eta = ctx.family if isinstance(ctx.family, inst.EtaForm) else _eta_of(ctx)
    z1, z2 = ctx.points()
    r = inst.eta_duality_residual(eta, MINKOWSKI, "SD", z1, z2, tol=tol)
    return [_res("sd-condition", r.residual, tol, z1.size,
                 f"[A1^* - i A1, A2] - i(d1 A2 - d2 A1); F classifies {r.classification.value}")]


def check_sd_commutator(ctx: Context):
    tol = ctx.tol(1e-12)
    eta = inst.eta_potential_form()
    z1, z2 = ctx.points()
    got = (eta.A2 @ eta.A1.adjoint() - eta.A1.adjoint() @ eta.A2)(z1, z2)
    K = np.array([[0, 1], [-1, 0]], dtype=complex)
    want = (np.exp(-1j * (z2 - np.pi / 4)) / np.sqrt(2))[:, None, None] * K
    return [_res("sd-commutator", _maxabs(got - want), tol, z1.size, "[A2, A1^*] against the closed form, h = 0")]


def check_curvature_nonzero(ctx: Context):
    A = ctx.connection
    if A is None:
        return [_info("curvature-nonzero", "scenario has no connection")]
    z1, z2 = ctx.points()
    nF = float(np.max(curvature(A)(z1, z2).norm()))
    return [_res("curvature-nonzero", nF, 1e-8, z1.size, "max ||F|| must exceed the tolerance", ok=nF > 1e-8)]


def check_gauge_normalize(ctx: Context):
    tol = ctx.tol(1e-10)
    eta = ctx.family if isinstance(ctx.family, inst.EtaForm) else _eta_of(ctx)
    z1, z2 = ctx.points()
    res = inst.gauge_normalize(eta, z1=z1, z2=z2)
    ref = curvature(inst.from_eta(inst.eta_potential_form()))(z1, z2).data
    got = curvature(res.connection)(z1, z2).data
    out = [
        _res("gauge-normalize/curvature", _maxabs(got - ref), tol, z1.size, "against the h = 0 curvature"),
        _res("gauge-normalize/unitarity", res.unitarity_defect, tol, z1.size),
        _res("gauge-normalize/normal-form", res.normal_form_gap, tol, z1.size),
        _info("gauge-normalize/A1-condition",
              f"||A1'^* - i A1'|| = {res.A1_prime_condition:.3g} (the normal form has A1'^* = i A1')"),
    ]
    return out


# ---------------------------------------------------------------------------
# Dirac monopole


def _dirac_suite(label, B1, B2, z1, z2, tol):
    A, rep = inst.build_dirac_monopole(B1, B2, z1, z2, tol)
    b, j = ym_residuals(A, None, EUCLIDEAN, z1, z2)
    vac = max(np.max(b), np.max(j))
    ok = rep.B1_normal and rep.B2_normal and rep.condition_b and rep.classification == "ASD" \
        and rep.curvature_norm > 1e-8 and vac <= tol
    detail = (f"normal {rep.B1_normal}/{rep.B2_normal}, condition (b) {rep.condition_b}, "
              f"class {rep.classification}, ||F|| {rep.curvature_norm:.3g}, ||[B1,B2]|| {rep.B1B2_commutator:.2g}")
    return _res(label, vac, tol, z1.size, detail, ok=ok)


def check_dirac(ctx: Context):
    tol = ctx.tol(1e-10)
    z1, z2 = ctx.points()
    if ctx.scenario.builtin == "dirac-monopole":
        from .algebra import matrix_from_json

        B1, B2 = (matrix_from_json(ctx.scenario.params[k]) for k in ("B1", "B2"))
    else:
        B1, B2 = DIRAC_B1, DIRAC_B2
    return [_dirac_suite("dirac", B1, B2, z1, z2, tol)]


def dirac_family(rng, n=2, count=5):
    out = []
    while len(out) < count:
        B1 = inst.random_normal(n, rng)
        if np.linalg.norm(B1 + madj(B1)) > 1e-3:
            out.append((B1, -madj(B1)))
    return out


def check_dirac_family(ctx: Context):
    tol = ctx.tol(1e-10)
    z1, z2 = ctx.points()
    return [_dirac_suite(f"dirac-family/{i}", B1, B2, z1, z2, tol)
            for i, (B1, B2) in enumerate(dirac_family(ctx.rng(7)))]


# ---------------------------------------------------------------------------
# BPST


def _bpst(ctx: Context) -> inst.BPST:
    if isinstance(ctx.family, inst.BPST):
        return ctx.family
    return inst.build_bpst(1.0)


def check_bpst_gamma(ctx: Context):
    tol = ctx.tol(1e-12)
    z1, z2 = sample_points_shell(ctx.scenario.points, ctx.scenario.seed)
    g = inst.bpst_gamma()(z1, z2)
    uni = _maxabs(madj(g) @ g - np.eye(2))
    det = _maxabs(np.linalg.det(g) - 1)
    return [_res("bpst-gamma", max(uni, det), tol, z1.size, f"unitarity {uni:.2g}, det-1 {det:.2g}")]


def check_bpst_decomposition(ctx: Context):
    tol = ctx.tol(1e-8)
    z1, z2 = sample_points_shell(ctx.scenario.points, ctx.scenario.seed)
    gfun = inst.bpst_gamma()
    g = gfun(z1, z2)
    eta = inst.bpst_eta()
    r = np.abs(z1) ** 2 + np.abs(z2) ** 2
    A_eta = inst.from_eta(eta)
    worst = 0.0
    for k, comp in enumerate(A_eta.components()):
        dg = fd_wirtinger(gfun, z1, z2, k, h=1e-4, richardson=True)
        lhs = madj(g) @ dg
        rhs = (-1.0 / (2 * r))[:, None, None] * comp(z1, z2)
        worst = max(worst, _maxabs(lhs - rhs) / max(1e-300, _maxabs(rhs)))
    return [_res("bpst-decomposition", worst, tol, z1.size,
                 "gamma^{-1} d gamma against -(eta - eta^*)/(2|z|^2), d by finite differences, relative")]


def check_bpst_curvature(ctx: Context):
    tol = ctx.tol(1e-8)
    b = _bpst(ctx)
    z1, z2 = sample_points_shell(ctx.scenario.points, ctx.scenario.seed)
    F = curvature(b.connection)(z1, z2).data
    P = b.predicted_curvature()(z1, z2).data
    scale = b.p_of(z1, z2)[:, None, None, None]
    gap = _maxabs((F - P) / scale)
    return [_res("bpst-curvature", gap, tol, z1.size, f"F = s p d eta with s = {b.sign:+d}; gap / p")]


def check_eb_inner(ctx: Context):
    tol = ctx.tol(1e-8)
    b = _bpst(ctx)
    z1, z2 = sample_points_shell(ctx.scenario.points, ctx.scenario.seed)
    fp = extract_eb(curvature(b.connection), z1, z2)
    got = eb_inner(fp, TraceKind.MATRIX)
    p = b.p_of(z1, z2)
    rel = _maxabs((got + 24 * p ** 2) / (24 * p ** 2))
    return [_res("eb-inner", rel, tol, z1.size, "<E, B> against -24 p^2, relative")]


def check_profile_ode(ctx: Context):
    tol = ctx.tol(1e-10)
    b = _bpst(ctx)
    r = np.geomspace(0.01, 100, 200)
    res = inst.profile_ode_residual(b.f, r)
    return [_res("profile-ode", _maxabs(res), tol, r.size, f"mu = {b.params.mu}")]


# ---------------------------------------------------------------------------
# criticality


def check_criticality(ctx: Context):
    tol = ctx.tol(1e-3)
    b = _bpst(ctx)
    # the finite difference only sees the support of the bump, and the
    # midpoint rule is far more accurate than Gauss on compactly supported
    # smooth integrands
    sq = ctx.scenario.quadrature
    quad = QuadratureSpec(sq.radius, sq.nodes_per_axis, "midpoint")
    out = []
    for seed in range(5):
        B = random_bump_direction(2, ctx.scenario.seed * 100 + seed, radius=quad.radius, degree=1, scale=0.3)
        d = directional_derivative(b.connection, B, None, EUCLIDEAN, quad, ctx.trace)
        bound = tol * d.scale
        worst = max(abs(d.finite_difference), abs(d.finite_difference - d.inner))
        out.append(_res(f"criticality/direction-{seed}", worst / d.scale, tol, 0,
                        f"dH/dt {d.finite_difference.real:.3g}, (B, D*F) {d.inner.real:.3g}, bound {bound:.3g}"))
    pert = b.connection + random_bump_direction(2, 10_000 + ctx.scenario.seed, radius=quad.radius, degree=1,
                                                scale=0.3)
    B = random_bump_direction(2, ctx.scenario.seed * 100, radius=quad.radius, degree=1, scale=0.3)
    d = directional_derivative(pert, B, None, EUCLIDEAN, quad, ctx.trace)
    ratio = abs(d.finite_difference) / (tol * d.scale)
    out.append(_res("criticality/negative-control", ratio, 10.0, 0,
                    f"|dH/dt| / bound = {ratio:.3g}, must be >= 10; FD vs inner gap {d.gap:.3g}", ok=ratio >= 10))
    return out


# ---------------------------------------------------------------------------
# constant connections


def _strict_upper(rng, n=3):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return np.triu(m, 1)


def check_constant_current(ctx: Context):
    tol = ctx.tol(1e-12)
    out = []
    for m in (EUCLIDEAN, MINKOWSKI):
        worst = 0.0
        rng = ctx.rng(11)
        for _ in range(5):
            A = Connection(*(constant(_strict_upper(rng)) for _ in range(4)))
            J = current(A, m).form(0.0, 0.0).data
            worst = max(worst, _maxabs(J))
        out.append(_res(f"constant-current/{m.name}", worst, tol, 5,
                        "strictly upper triangular 3x3 components; max |J|"))
    return out


def i_adjoint_family(rng, n=2, count=5):
    """A1^* = i A1 (A1 = e^{-i pi/4} H, H Hermitian), A2 normal."""
    out = []
    for _ in range(count):
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = X + madj(X)
        out.append((np.exp(-0.25j * np.pi) * H, inst.random_normal(n, rng)))
    return out


def check_constant_duality(ctx: Context):
    tol = ctx.tol(1e-10)
    out = []
    if ctx.scenario.builtin == "constant":
        rep = ctx.family
        for m in ("euclidean", "minkowski"):
            conds = rep.conditions
            want = "SD" if conds[f"{m}_SD"] else "ASD" if conds[f"{m}_ASD"] else None
            got = rep.classification[m]
            if want is None:
                out.append(_info(f"constant-duality/{m}", f"no condition holds; F classifies {got}"))
            else:
                out.append(_res(f"constant-duality/{m}", 0.0 if got == want else 1.0, tol, 1,
                                f"condition predicts {want}, F classifies {got}", ok=got == want))
        return out
    for i, (A1, A2) in enumerate(i_adjoint_family(ctx.rng(13))):
        _, rep = inst.build_constant(A1, A2, tol=tol)
        got = rep.classification["minkowski"]
        ok = rep.conditions["minkowski_SD"] and got == "SD"
        out.append(_res(f"constant-duality/A1*=iA1-{i}", 0.0 if ok else 1.0, tol, 1,
                        f"condition {rep.conditions['minkowski_SD']}, F classifies {got}", ok=ok))
    return out


# ---------------------------------------------------------------------------
# sign laws for <E, B>


def _stated_ray(metric: str, cls: str) -> complex:
    """Direction of the stated ray: <E, B> in R_{>=0} * direction."""
    if metric == "euclidean":
        return 1.0 if cls == "SD" else -1.0
    return 1j if cls == "SD" else -1j


def _instanton_candidates(ctx: Context):
    """(label, metric, connection, points) for every family tried."""
    zs = sample_points_shell(50, ctx.scenario.seed)
    zp = sample_points(50, ctx.scenario.seed)
    out = []
    for mu in (0.5, 1.0, 4.0):
        out.append((f"bpst-mu{mu:g}", "euclidean", inst.build_bpst(mu).connection, zs))
    out.append(("dirac", "euclidean", inst.build_dirac_monopole(DIRAC_B1, DIRAC_B2)[0], zp))
    for i, (B1, B2) in enumerate(dirac_family(ctx.rng(7))):
        out.append((f"dirac-family-{i}", "euclidean", inst.build_dirac_monopole(B1, B2)[0], zp))
    out.append(("eta-potential", "minkowski", inst.build_eta_potential()[1], zp))
    out.append(("nilpotent-sd", "minkowski", inst.nilpotent_minkowski_sd(), zp))
    for i, (A1, A2) in enumerate(i_adjoint_family(ctx.rng(13), count=2)):
        out.append((f"A1*=iA1-{i}", "minkowski", inst.build_constant(A1, A2)[0], zp))
    return out


def check_sign_law(ctx: Context):
    tol = ctx.tol(1e-8)
    out = []
    verified = {"euclidean": 0, "minkowski": 0}
    for label, m, A, (z1, z2) in _instanton_candidates(ctx):
        F = curvature(A)(z1, z2)
        cls = classify_duality(F, m, 1e-10)
        b, j = ym_residuals(A, None, m, z1, z2)
        vac = max(np.max(b), np.max(j)) / max(1.0, float(np.max(F.norm())))
        if cls not in (DualityClass.SD, DualityClass.ASD) or vac > 1e-6:
            note = f"not a verified {m} instanton (class {cls.value}, relative vacuum residual {vac:.2g})"
            if cls in (DualityClass.SD, DualityClass.ASD):
                eb = eb_inner(extract_eb(F))
                k = int(np.argmax(np.abs(eb)))
                note += f"; its <E,B> lies along {eb[k] / abs(eb[k]):.3g}"
            out.append(_info(f"sign-law/{label}", note, z1.size))
            continue
        verified[m] += 1
        eb = eb_inner(extract_eb(F))
        ray = _stated_ray(m, cls.value)
        along = (eb / ray).real
        across = np.abs((eb / ray).imag)
        scale = np.maximum(np.abs(eb), 1e-300)
        off = float(np.max(across / scale))
        neg = float(np.max(np.maximum(-along, 0) / scale))
        out.append(_res(f"sign-law/{label}", max(off, neg), tol, z1.size,
                        f"{m} {cls.value}: <E,B> on {'+' if ray in (1, 1j) else '-'}"
                        f"{'i' if m == 'minkowski' else ''}R_>=0"))
    for m, k in verified.items():
        if k == 0:
            out.append(_info(f"sign-law/{m}", "no verified instanton family; the law is not exercised"))
    return out


# ---------------------------------------------------------------------------
# profile optimisation


def bpst_knots(mu: float = 1.0) -> np.ndarray:
    """Six interior knots in r = |z|^2 and the endpoints 0 and 12 mu."""
    return mu * np.array([0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0])


def perturbed_bpst_profile(mu: float = 1.0, amount: float = 0.1) -> ProfileParam:
    knots = bpst_knots(mu)
    exact = ProfileParam.bpst(knots, mu)
    v = exact.values.copy()
    v[1:-1] *= 1 + amount * np.array([1, -1, 1, -1, 1, -1])
    return ProfileParam(knots, v)


def check_profile_optimization(ctx: Context):
    mu = float(ctx.scenario.params.get("mu", 1.0)) if ctx.scenario.builtin == "bpst" else 1.0
    res = optimize_profile(perturbed_bpst_profile(mu), mu_hint=None)
    H = np.array([h["H"] for h in res.history])
    mono = bool(np.all(np.diff(H) <= 0))
    ratio = res.initial_residual / max(res.final_residual, 1e-300)
    return [
        _res("profile-optimization/residual-drop", 1.0 / ratio, 0.1, len(H),
             f"ODE residual {res.initial_residual:.3g} -> {res.final_residual:.3g} ({ratio:.1f}x), "
             f"{res.accepted_steps} accepted steps"),
        _res("profile-optimization/H-monotone", 0.0 if mono else 1.0, 0.0, len(H),
             f"H {H[0]:.6g} -> {H[-1]:.6g}", ok=mono),
    ]


CHECKS = {
    "star-table": check_star_table,
    "involution": check_involution,
    "adjointness": check_adjointness,
    "curvature-crosscheck": check_curvature_crosscheck,
    "current-crosscheck": check_current_crosscheck,
    "bianchi": check_bianchi,
    "lorenz-families": check_lorenz_families,
    "sd-condition": check_sd,
    "sd-commutator": check_sd_commutator,
    "curvature-nonzero": check_curvature_nonzero,
    "vacuum": check_vacuum,
    "gauge-normalize": check_gauge_normalize,
    "dirac": check_dirac,
    "dirac-family": check_dirac_family,
    "bpst-gamma": check_bpst_gamma,
    "bpst-decomposition": check_bpst_decomposition,
    "bpst-curvature": check_bpst_curvature,
    "duality": check_duality,
    "eb-inner": check_eb_inner,
    "profile-ode": check_profile_ode,
    "criticality": check_criticality,
    "constant-current": check_constant_current,
    "constant-duality": check_constant_duality,
    "sign-law": check_sign_law,
    "profile-optimization": check_profile_optimization,
}


def run_check(name: str, ctx: Context) -> list:
    return CHECKS[name](ctx)


def run_checks(ctx: Context, names=None):
    from .scenario import Report

    sc = ctx.scenario
    rep = Report(sc.name, sc.seed, sc.metric)
    for name in names if names is not None else sc.checks:
        rep.checks.extend(run_check(name, ctx))
    return rep
