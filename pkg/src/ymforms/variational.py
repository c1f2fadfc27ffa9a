"""Electric/magnetic fields, the Yang-Mills functional and its criticality.

The functional is ``H(A) = (A, -J) + 1/2 (F_A, F_A)``, integrated with a
``QuadratureSpec``.  ``directional_derivative`` compares a finite difference
of ``H`` along a compactly supported direction with the inner product
``(B, D_A^* F_A - J)``; the two routes share nothing but the quadrature grid.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.interpolate import PchipInterpolator

from .algebra import TraceKind
from .coefficients import radial_term, poly, prepare_points
from .forms import FormField, FormValue
from .hodge import EUCLIDEAN, QuadratureSpec, get_metric, global_inner, integrate, pointwise_inner
from .instantons import bpst_gamma
from .radial import R, SplineRadial, SymRadial
from .yang_mills import Connection, CurrentForm, Curvature, covariant_costar, covariant_d, curvature

__all__ = [
    "EB_MATRIX",
    "FieldPair",
    "extract_eb",
    "fields_to_curvature",
    "eb_inner",
    "hermitian_field_check",
    "lagrangian",
    "FunctionalValue",
    "ConvergenceError",
    "functional",
    "bump_radial",
    "random_bump_direction",
    "DirectionalDerivative",
    "directional_derivative",
    "ProfileParam",
    "profile_connection",
    "OptimizeResult",
    "optimize_profile",
]

# rows E1 E2 E3 B1 B2 B3; columns follow the 2-form basis
# dz1^dz2 (F12), dz1^dzb1 (F11b), dz1^dzb2 (F12b), dz2^dzb1 (F21b), dz2^dzb2 (F22b), dzb1^dzb2 (F1b2b)
EB_MATRIX = np.array(
    [
        [0, 2j, 0, 0, 0, 0],
        [-1, 0, -1, 1, 0, -1],
        [-1j, 0, 1j, 1j, 0, 1j],
        [0, 0, 0, 0, 2j, 0],
        [-1, 0, 1, -1, 0, -1],
        [-1j, 0, -1j, -1j, 0, 1j],
    ],
    dtype=complex,
)
EB_MATRIX.setflags(write=False)


@dataclass
class FieldPair:
    """E and B as arrays of shape ``(3,) + batch + (n, n)``."""

    E: np.ndarray
    B: np.ndarray


def _as_value(F, z1=None, z2=None) -> FormValue:
    if isinstance(F, FormValue):
        return F
    if isinstance(F, (Curvature, FormField)):
        return F(z1, z2)
    raise TypeError("expected a Curvature, FormField or FormValue")


def extract_eb(F, z1=None, z2=None) -> FieldPair:
    v = _as_value(F, z1, z2)
    if v.degree != 2:
        raise ValueError("E and B come from a 2-form")
    eb = np.einsum("ri,...ijk->r...jk", EB_MATRIX, v.data)
    return FieldPair(eb[:3], eb[3:])


def fields_to_curvature(fp: FieldPair) -> FormValue:
    """Inverse of ``extract_eb``."""
    eb = np.concatenate([fp.E, fp.B], axis=0)
    inv = np.linalg.inv(EB_MATRIX)
    return FormValue(2, np.einsum("ir,r...jk->...ijk", inv, eb))


def eb_inner(fp: FieldPair, kind=TraceKind.MATRIX):
    """Tr(E1 B1^* + E2 B2^* + E3 B3^*), per point."""
    t = np.sum(fp.E * np.conj(fp.B), axis=(0, -2, -1))
    if TraceKind.parse(kind) is TraceKind.STATE:
        t = t / fp.E.shape[-1]
    return t


def hermitian_field_check(fp: FieldPair, tol: float = 1e-10) -> tuple:
    def herm(x):
        gap = np.linalg.norm(x - np.conj(np.swapaxes(x, -1, -2)))
        return bool(gap <= tol * max(1.0, np.linalg.norm(x)))

    return herm(fp.E), herm(fp.B)


def lagrangian(A: Connection, J: CurrentForm | None, m, z1, z2, kind=TraceKind.MATRIX, F: Curvature | None = None):
    """Density of Tr(-A ^ *J^* + 1/2 F ^ *F^*) against vol, per point."""
    m = get_metric(m)
    z1, z2 = prepare_points(z1, z2)
    F = F or curvature(A)
    Fv = F(z1, z2)
    out = 0.5 * pointwise_inner(Fv, Fv, m, kind)
    if J is not None:
        out = out - pointwise_inner(A(z1, z2), J.form(z1, z2), m, kind)
    return out


class ConvergenceError(ArithmeticError):
    """The functional's integral is too large to be meaningful."""


@dataclass
class FunctionalValue:
    value: complex
    source_term: complex
    field_term: complex
    split_gap: float


def functional(A: Connection, J: CurrentForm | None, m=EUCLIDEAN, quad: QuadratureSpec = QuadratureSpec(),
               kind=TraceKind.MATRIX, F: Curvature | None = None, limit: float = 1e12,
               split: bool = True) -> FunctionalValue:
    """H(A); with ``split`` also (A, -J) and 1/2 (F, F) integrated separately."""
    m = get_metric(m)
    F = F or curvature(A)
    value = integrate(lambda a, b: lagrangian(A, J, m, a, b, kind, F), quad)
    if not np.isfinite(value) or abs(value) > limit:
        raise ConvergenceError(f"functional magnitude {abs(value):.3g} exceeds {limit:.3g}")
    if not split:
        return FunctionalValue(complex(value), np.nan, np.nan, np.nan)
    field_term = 0.5 * global_inner(F.form, F.form, m, quad, kind)
    source = 0j if J is None else -global_inner(A.form, J.form, m, quad, kind)
    gap = abs(value - (source + field_term))
    return FunctionalValue(complex(value), complex(source), complex(field_term), float(gap))


# ---------------------------------------------------------------------------
# compactly supported directions


def bump_radial(radius: float = 6.0, steepness: float | None = None) -> SymRadial:
    """exp(s / (|x|^2 - R^2)) inside |x| < R, zero outside; s defaults to R^2."""
    s = radius ** 2 if steepness is None else steepness
    R2 = sp.Float(radius) ** 2
    return SymRadial(sp.Piecewise((sp.exp(sp.Float(s) / (R - R2)), R < R2), (0, True)))


def random_bump_direction(dim: int, seed: int, radius: float = 6.0, degree: int = 1, scale: float = 1.0,
                          skew: bool = True) -> Connection:
    """Bump times a random polynomial of the given degree with random matrices.

    With ``skew`` the result is beta - beta^* for a random (1,0)-form beta.
    """
    rng = np.random.default_rng(seed)
    bump = radial_term(bump_radial(radius), np.eye(dim))

    def rand_coef():
        terms = []
        for pw in _monomials(degree):
            m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            terms.append((pw, scale * m / np.sqrt(2 * dim)))
        return poly(terms) @ bump

    b1, b2 = rand_coef(), rand_coef()
    if skew:
        return Connection(b1, b2, -b1.adjoint(), -b2.adjoint())
    return Connection(b1, b2, rand_coef(), rand_coef())


def _monomials(degree: int):
    out = []
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            for c in range(degree + 1 - a - b):
                for d in range(degree + 1 - a - b - c):
                    out.append((a, b, c, d))
    return out


@dataclass
class DirectionalDerivative:
    finite_difference: complex
    inner: complex
    predicted: complex
    gap: float
    scale: float
    t: float


def directional_derivative(A: Connection, B: Connection, J: CurrentForm | None = None, m=EUCLIDEAN,
                           quad: QuadratureSpec = QuadratureSpec(), kind=TraceKind.MATRIX,
                           t: float = 1e-4, richardson: bool = True) -> DirectionalDerivative:
    """d/dt H(A + tB) at t = 0 two ways.

    ``finite_difference``: central difference of H, each H from the curvature of
    A + tB computed afresh.  ``inner``: (B, D_A^* F_A - J).  Since H is real-linear
    in its source part and Hermitian-quadratic in F, the exact derivative is
    ``predicted = -(B, J) + Re (B, D_A^* F_A)``, which equals ``inner`` whenever
    that is real (e.g. skew-Hermitian A and B in vacuum).  ``scale`` is
    ||D_A B|| ||F_A||, the Cauchy-Schwarz bound for the derivative.
    """
    m = get_metric(m)

    def H(s):
        As = A + B * s
        return functional(As, J, m, quad, kind, split=False).value

    def central(h):
        return (H(h) - H(-h)) / (2 * h)

    fd = central(t)
    if richardson:
        fd = (4 * central(t / 2) - fd) / 3
    F = curvature(A)
    costar = covariant_costar(A, F.form, m)
    resid = costar if J is None else costar - J.form
    inner = global_inner(B.form, resid, m, quad, kind)
    pj = 0j if J is None else global_inner(B.form, J.form, m, quad, kind)
    pf = global_inner(B.form, costar, m, quad, kind)
    predicted = -pj + pf.real
    DB = covariant_d(A, B.form)
    nDB = np.sqrt(abs(global_inner(DB, DB, EUCLIDEAN, quad, kind)))
    nF = np.sqrt(abs(global_inner(F.form, F.form, EUCLIDEAN, quad, kind)))
    return DirectionalDerivative(complex(fd), complex(inner), complex(predicted), float(abs(fd - predicted)),
                                 float(nDB * nF), t)


# ---------------------------------------------------------------------------
# radial profile optimisation


@dataclass
class ProfileParam:
    """Monotone cubic profile f(r) through knots in r = |z|^2.

    The first knot must be r = 0 and its value is forced to 0; the last value
    is held fixed by the optimiser (it sets the boundary condition).
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        self.values = np.clip(np.asarray(self.values, dtype=float), 0.0, 1.0)
        if self.knots.ndim != 1 or len(self.knots) < 5:
            raise ValueError("a profile needs at least 5 knots (K >= 4)")
        if self.knots[0] != 0 or np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must start at 0 and increase strictly")
        if self.values.shape != self.knots.shape:
            raise ValueError("one value per knot")
        self.values[0] = 0.0

    def radial(self) -> SplineRadial:
        return SplineRadial(PchipInterpolator(self.knots, self.values), 0.0, self.knots[-1])

    def __call__(self, r):
        return self.radial()(r).real

    def with_values(self, values) -> "ProfileParam":
        return ProfileParam(self.knots.copy(), values)

    @classmethod
    def bpst(cls, knots, mu: float = 1.0) -> "ProfileParam":
        knots = np.asarray(knots, dtype=float)
        return cls(knots, knots / (knots + mu))


def profile_connection(f) -> Connection:
    """A_f = f(r) gamma^* d gamma for a radial factor f."""
    g = bpst_gamma()
    gs = g.adjoint()
    fI = radial_term(f, np.eye(2))
    return Connection(*(fI @ (gs @ g.wirtinger(k)) for k in range(4)))


@dataclass
class OptimizeResult:
    profile: ProfileParam
    history: list = field(default_factory=list)
    accepted_steps: int = 0
    stalled: bool = False
    initial_residual: float = 0.0
    final_residual: float = 0.0

    def history_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["iteration", "H", "ode_residual", "step_norm"])
        for row in self.history:
            w.writerow([row["iteration"], f"{row['H']:.15g}", f"{row['ode_residual']:.6g}", f"{row['step_norm']:.6g}"])
        return buf.getvalue()


def _ode_rms(p: ProfileParam, n: int = 400) -> float:
    """L2 norm of the profile-ODE residual over the shell between the first
    interior knot and the last knot, in the 4d volume measure (r dr up to a
    constant), normalised by the shell volume."""
    from .instantons import profile_ode_residual

    r = np.geomspace(p.knots[1], p.knots[-1], n)
    res = profile_ode_residual(p.radial(), r)
    return float(np.sqrt(np.trapezoid(res ** 2 * r, r) / np.trapezoid(r, r)))


def optimize_profile(init: ProfileParam, mu_hint: float | None = None, m=EUCLIDEAN,
                     quad: QuadratureSpec | None = None, step: float = 0.02, min_step: float = 1e-5,
                     max_sweeps: int = 400, tol: float = 1e-12, rtol: float = 0.0) -> OptimizeResult:
    """Coordinate descent on Re H(A_f) over the interior knot values.

    Every free knot keeps its own step.  A sweep tries +-step on each one; a
    decrease by more than ``tol + rtol * |H|`` is accepted and doubles that
    step, a failure halves it.
    The search ends when every step is below ``min_step`` (converged) or after
    ``max_sweeps`` (``stalled``).  With ``mu_hint`` the first step is scaled to
    the local slope of the profile r / (r + mu) at each knot.
    """
    if get_metric(m).kind.value != "euclidean":
        raise ValueError("profile optimisation runs in Euclidean signature")
    if quad is None:
        quad = QuadratureSpec(radius=float(np.sqrt(init.knots[-1])), nodes_per_axis=96, rule="radial",
                              directions=4)
    free = np.arange(1, len(init.knots) - 1)

    def H(p: ProfileParam) -> float:
        val = functional(profile_connection(p.radial()), None, m, quad, split=False).value
        if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
            raise ArithmeticError(f"functional not real for a skew ansatz: {val}")
        return val.real

    cur = init
    h_cur = H(cur)
    out = OptimizeResult(cur, initial_residual=_ode_rms(cur))
    out.history.append({"iteration": 0, "H": h_cur, "ode_residual": out.initial_residual, "step_norm": 0.0})
    steps = np.full(len(init.knots), float(step))
    if mu_hint is not None:
        k = init.knots
        steps = np.maximum(step * mu_hint * k / (k + mu_hint) ** 2 * 4, min_step)
    for sweep in range(max_sweeps):
        if np.all(steps[free] < min_step):
            break
        for k in free:
            if steps[k] < min_step:
                continue
            accepted = False
            for sgn in (1.0, -1.0):
                vals = cur.values.copy()
                vals[k] = np.clip(vals[k] + sgn * steps[k], 0.0, 1.0)
                if vals[k] == cur.values[k]:
                    continue
                cand = cur.with_values(vals)
                h_c = H(cand)
                if h_c < h_cur - (tol + rtol * abs(h_cur)):
                    delta = float(np.linalg.norm(cand.values - cur.values))
                    cur, h_cur = cand, h_c
                    out.accepted_steps += 1
                    out.history.append({"iteration": out.accepted_steps, "H": h_cur,
                                        "ode_residual": _ode_rms(cur), "step_norm": delta})
                    accepted = True
                    break
            steps[k] = min(2 * steps[k], 0.25) if accepted else 0.5 * steps[k]
    else:
        out.stalled = bool(np.any(steps[free] >= min_step))
    out.profile = cur
    out.final_residual = _ode_rms(cur)
    return out
