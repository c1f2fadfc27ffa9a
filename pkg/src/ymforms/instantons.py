"""Builders and verifiers for special connection families.

Everything built here is of the form ``A = eta - eta^*`` (or ``f gamma^* d gamma``
for BPST) with exact coefficients, so curvature and currents are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .algebra import PAULI, SIGMA1, SIGMA2, SIGMA3, adjoint as madj, commutator, is_normal
from .coefficients import (
    Coefficient,
    ExactCoefficient,
    constant,
    exp_term,
    expm,
    monomial,
    prepare_points,
    radial_term,
    variable,
    zero,
)
from .forms import FormField
from .hodge import DualityClass, MetricKind, classify_duality, get_metric
from .radial import R, SymRadial
from .yang_mills import Connection, GaugeMap, comm, curvature, gauge_transform, sample_points

__all__ = [
    "EtaForm",
    "from_eta",
    "maurer_cartan_residual",
    "DualityResult",
    "eta_duality_residual",
    "ConstantReport",
    "build_constant",
    "eta_potential_form",
    "build_eta_potential",
    "DiracReport",
    "build_dirac_monopole",
    "random_normal",
    "BPSTParams",
    "BPST",
    "build_bpst",
    "bpst_gamma",
    "bpst_eta",
    "profile_ode_residual",
    "NormalizeResult",
    "gauge_normalize",
    "nilpotent_minkowski_sd",
]


def _maxnorm(x) -> float:
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(x, axis=(-2, -1))))


@dataclass(frozen=True)
class EtaForm:
    """The (1,0)-form A1 dz1 + A2 dz2."""

    A1: Coefficient
    A2: Coefficient
    holomorphic: bool = True
    normal: bool = True

    @property
    def dim(self):
        return self.A1.dim

    @property
    def form(self) -> FormField:
        return FormField.one_form(self.A1, self.A2, None, None, dim=self.dim)

    def check_flags(self, z1, z2, tol: float = 1e-10) -> dict:
        """Numerical evidence for the declared flags at the given points."""
        out = {}
        if self.holomorphic:
            out["holomorphic"] = max(_maxnorm(a.wirtinger(k)(z1, z2)) for a in (self.A1, self.A2) for k in (2, 3))
        if self.normal:
            worst = 0.0
            for a in (self.A1, self.A2):
                v = a(z1, z2)
                vh = madj(v)
                gap = np.linalg.norm(v @ vh - vh @ v, axis=(-2, -1)) / np.maximum(1, np.linalg.norm(v, axis=(-2, -1)) ** 2)
                worst = max(worst, float(np.max(gap)))
            out["normal"] = worst
        return out

    def require_flags(self, z1, z2, tol: float = 1e-10) -> None:
        bad = {k: v for k, v in self.check_flags(z1, z2, tol).items() if v > tol}
        if bad:
            raise ValueError(f"eta violates its declared flags: {bad}")


def from_eta(eta: EtaForm, kind: str = "skew") -> Connection:
    """``eta - eta^*`` (skew) or ``eta + eta^*`` (hermitian)."""
    if kind not in ("skew", "hermitian"):
        raise ValueError("kind must be 'skew' or 'hermitian'")
    s = -1.0 if kind == "skew" else 1.0
    return Connection(eta.A1, eta.A2, eta.A1.adjoint() * s, eta.A2.adjoint() * s)


def maurer_cartan_residual(a, z1, z2) -> dict:
    """Pointwise norms of dA + A^A; for a (1,0)-form also its delbar part and dz1^dz2 part."""
    if isinstance(a, EtaForm):
        a = a.form
    if isinstance(a, Connection):
        a = a.form
    z1, z2 = prepare_points(z1, z2)
    F = a.d() + a.wedge(a)
    out = {"total": F(z1, z2).norm()}
    is_10 = all(b in ((0,), (1,)) for b in a.coeffs)
    if is_10:
        A1, A2 = a.component((0,)), a.component((1,))
        out["delbar"] = a.d("delbar")(z1, z2).norm()
        out["holomorphic_part"] = np.linalg.norm(
            (A2.wirtinger(0) - A1.wirtinger(1) + comm(A1, A2))(z1, z2), axis=(-2, -1)
        )
    return out


# ---------------------------------------------------------------------------
# holomorphic normal families


@dataclass
class DualityResult:
    metric: str
    target: str
    residual: float
    predicted: FormField
    crosscheck_gap: float | None
    classification: DualityClass
    points: int


def _omega_minkowski(A1, A2, target: str, dim: int) -> FormField:
    c = comm(A2, A1.adjoint())
    if target == "SD":
        w = FormField(2, dim, {(0, 1): c * 1j, (1, 2): -c})
    else:
        w = FormField(2, dim, {(0, 1): c * -1j, (1, 2): -c})
    return w - w.adjoint()


def eta_duality_residual(eta: EtaForm, m="euclidean", target: str = "SD", z1=None, z2=None,
                            tol: float = 1e-10) -> DualityResult:
    """Residual of the SD/ASD condition for a holomorphic normal eta, plus the predicted F.

    Euclidean SD: [A1, A2] = 0, F = d eta - (d eta)^*.
    Euclidean ASD: F12 = 0, F = -[A1, A2^*] dz1^dzb2 - [A2, A1^*] dz2^dzb1.
    Minkowski SD/ASD: [A1^* -+ i A1, A2] = +-i (d1 A2 - d2 A1), F = w - w^*.
    """
    m = get_metric(m)
    target = target.upper()
    if target not in ("SD", "ASD"):
        raise ValueError("target must be 'SD' or 'ASD'")
    if z1 is None:
        z1, z2 = sample_points(100, 0)
    z1, z2 = prepare_points(z1, z2)
    eta.require_flags(z1, z2, tol=max(tol, 1e-8))
    A1, A2, n = eta.A1, eta.A2, eta.dim
    curl = A2.wirtinger(0) - A1.wirtinger(1)
    if m.kind is MetricKind.EUCLIDEAN:
        if target == "SD":
            cond = comm(A1, A2)
            predicted = FormField(2, n, {(0, 1): curl, (2, 3): -(A2.adjoint().wirtinger(2) - A1.adjoint().wirtinger(3))})
        else:
            cond = curl + comm(A1, A2)
            predicted = FormField(2, n, {(0, 3): -comm(A1, A2.adjoint()), (1, 2): -comm(A2, A1.adjoint())})
    else:
        if target == "SD":
            cond = comm(A1.adjoint() - 1j * A1, A2) - 1j * curl
        else:
            cond = comm(A1.adjoint() + 1j * A1, A2) + 1j * curl
        predicted = _omega_minkowski(A1, A2, target, n)
    residual = _maxnorm(cond(z1, z2))
    F = curvature(from_eta(eta))
    Fv = F(z1, z2)
    gap = None
    if residual <= tol * max(1.0, _maxnorm(curl(z1, z2))):
        gap = float(np.max((Fv - predicted(z1, z2)).norm()))
    return DualityResult(m.name, target, residual, predicted, gap, classify_duality(Fv, m, tol), z1.size)


@dataclass
class ConstantReport:
    conditions: dict
    classification: dict
    connection: Connection = field(repr=False)


def build_constant(A1, A2, m="euclidean", tol: float = 1e-10):
    """Constant connection eta - eta^* with eta = A1 dz1 + A2 dz2, and a condition report."""
    A1 = np.asarray(A1, dtype=complex)
    A2 = np.asarray(A2, dtype=complex)
    if A1.shape != A2.shape:
        raise ValueError("A1 and A2 must have the same shape")
    eta = EtaForm(constant(A1), constant(A2), holomorphic=True, normal=False)
    A = from_eta(eta)
    h1, h2 = madj(A1), madj(A2)

    def small(x):
        return float(np.linalg.norm(x)) <= tol * max(1.0, np.linalg.norm(A1) ** 2 + np.linalg.norm(A2) ** 2)

    normal = is_normal(A1, tol) and is_normal(A2, tol)
    conds = {
        "euclidean_SD": small(commutator(A1, h2)) and small(commutator(A1, h1) - commutator(A2, h2)),
        "euclidean_ASD": small(commutator(A1, A2)) and small(commutator(A1, h1) + commutator(A2, h2)),
        "minkowski_SD": normal and small(commutator(h1 - 1j * A1, A2)),
        "minkowski_ASD": normal and small(commutator(h1 + 1j * A1, A2)),
    }
    Fv = curvature(A)(0.0, 0.0)
    classes = {k: classify_duality(Fv, k, tol).value for k in ("euclidean", "minkowski")}
    return A, ConstantReport(conds, classes, A)


def nilpotent_minkowski_sd():
    """A constant, non-skew connection in strictly upper triangular 3x3 matrices
    whose curvature is Minkowski self-dual and nonzero."""
    E12 = np.zeros((3, 3), complex)
    E12[0, 1] = 1
    E23 = np.zeros((3, 3), complex)
    E23[1, 2] = 1
    return Connection(constant(E12), constant(E23), constant(-1j * E12 + E23), constant(-1j * E12 + 0.5 * E23))


# ---------------------------------------------------------------------------
# the two-by-two holomorphic example with a Minkowski self-dual condition

_U = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)


def eta_potential_form(h: ExactCoefficient | None = None) -> EtaForm:
    """A1 = diag(h, h + 1 - i), A2 = U^* diag(H + cos z2, H + i sin z2) U, H = int_0^z1 d2 h."""
    if h is None:
        h = zero(1)
    if h.dim != 1 or not h.is_holomorphic():
        raise ValueError("h must be a scalar holomorphic exact coefficient")
    I2 = np.eye(2)
    A1 = h.times_matrix(I2) + constant(np.diag([0, 1 - 1j]))
    H = h.wirtinger(1).antiderivative(0)
    Us = _U.conj().T
    e_plus = exp_term((0, 1j, 0, 0), [[1]])
    e_minus = exp_term((0, -1j, 0, 0), [[1]])
    cos = (e_plus + e_minus) * 0.5
    isin = (e_plus - e_minus) * 0.5
    P1 = Us @ np.diag([1, 0]) @ _U
    P2 = Us @ np.diag([0, 1]) @ _U
    A2 = H.times_matrix(I2) + cos.times_matrix(P1) + isin.times_matrix(P2)
    return EtaForm(A1, A2, holomorphic=True, normal=True)


def build_eta_potential(h: ExactCoefficient | None = None):
    eta = eta_potential_form(h)
    return eta, from_eta(eta)


# ---------------------------------------------------------------------------
# Dirac monopole


@dataclass
class DiracReport:
    B1_normal: bool
    B2_normal: bool
    condition_a: bool
    condition_b: bool
    B1B2_commutator: float
    classification: str
    curvature_norm: float


def build_dirac_monopole(B1, B2, z1=None, z2=None, tol: float = 1e-10):
    """eta = zb1 B1 dz1 + zb2 B2 dz2; returns the skew connection and a report.

    The report also carries ||[B1, B2]||: the ASD condition needs it to vanish
    (it is the dz1^dz2 component of F up to the factor zb1 zb2).
    """
    B1 = np.asarray(B1, dtype=complex)
    B2 = np.asarray(B2, dtype=complex)
    n = B1.shape[0]
    if B1.shape != (n, n) or B2.shape != (n, n):
        raise ValueError(f"B1 and B2 must be square of equal size, got {B1.shape} and {B2.shape}")
    eta = EtaForm(monomial((0, 0, 1, 0), B1), monomial((0, 0, 0, 1), B2), holomorphic=False, normal=False)
    A = from_eta(eta)
    if z1 is None:
        z1, z2 = sample_points(100, 0)
    n1, n2 = is_normal(B1, tol), is_normal(B2, tol)
    s1, s2 = B1 + madj(B1), B2 + madj(B2)
    scale = max(1.0, np.linalg.norm(B1) + np.linalg.norm(B2))
    cond_a = n1 and n2 and np.linalg.norm(commutator(B1, madj(B2))) <= tol * scale ** 2 \
        and np.linalg.norm(s1 - s2) <= tol * scale
    cond_b = n1 and n2 and np.linalg.norm(s1 + s2) <= tol * scale
    Fv = curvature(A)(z1, z2)
    rep = DiracReport(n1, n2, bool(cond_a), bool(cond_b), float(np.linalg.norm(commutator(B1, B2))),
                      classify_duality(Fv, "euclidean", tol).value, float(np.max(Fv.norm())))
    return A, rep


def random_normal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random normal matrix: unitary conjugate of a random complex diagonal."""
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    d = rng.normal(size=n) + 1j * rng.normal(size=n)
    return q @ np.diag(d) @ q.conj().T


# ---------------------------------------------------------------------------
# BPST


@dataclass(frozen=True)
class BPSTParams:
    mu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")


_INV_SQRT_R = SymRadial(R ** sp.Rational(-1, 2))


def bpst_gamma() -> ExactCoefficient:
    """gamma = (x0 - i sum x_j sigma_j) / |x| as an exact coefficient."""
    I2 = np.eye(2)
    # x0 = (z1 + zb1)/2, x1 = -i (z1 - zb1)/2, x2 = (z2 + zb2)/2, x3 = -i (z2 - zb2)/2
    lin = {
        0: 0.5 * I2 - 1j * (-0.5j) * SIGMA1,
        2: 0.5 * I2 - 1j * (0.5j) * SIGMA1,
        1: -1j * 0.5 * SIGMA2 - 1j * (-0.5j) * SIGMA3,
        3: -1j * 0.5 * SIGMA2 - 1j * (0.5j) * SIGMA3,
    }
    out = None
    for k, mat in lin.items():
        pw = [0, 0, 0, 0]
        pw[k] = 1
        t = radial_term(_INV_SQRT_R, mat, pw)
        out = t if out is None else out + t
    return out


def bpst_eta() -> EtaForm:
    s1, s2, s3 = PAULI
    z = {k: variable(k, 1) for k in range(4)}
    A1 = z[2].times_matrix(s1) + z[3].times_matrix(-1j * s2) + z[3].times_matrix(s3)
    A2 = z[3].times_matrix(-s1) + z[2].times_matrix(1j * s2) + z[2].times_matrix(s3)
    return EtaForm(A1, A2, holomorphic=False, normal=False)


@dataclass
class BPST:
    params: BPSTParams
    connection: Connection
    gamma: ExactCoefficient
    eta: EtaForm
    f: SymRadial
    p: SymRadial
    sign: int

    def p_of(self, z1, z2):
        r = np.abs(z1) ** 2 + np.abs(z2) ** 2
        return self.params.mu / (r + self.params.mu) ** 2

    @property
    def d_eta(self) -> FormField:
        return self.eta.form.d()

    def predicted_curvature(self) -> FormField:
        n = self.connection.dim
        return self.d_eta.map_coefficients(lambda c: c @ radial_term(self.p, np.eye(n)) * self.sign)


def build_bpst(params: BPSTParams | float = BPSTParams()) -> BPST:
    """A = f gamma^* d gamma with f = r/(r + mu); the sign s in F = s p d eta is measured."""
    if not isinstance(params, BPSTParams):
        params = BPSTParams(float(params))
    mu = params.mu
    g = bpst_gamma()
    gs = g.adjoint()
    f = SymRadial(R / (R + mu))
    p = SymRadial(mu / (R + mu) ** 2)
    fI = radial_term(f, np.eye(2))
    comps = [fI @ (gs @ g.wirtinger(k)) for k in range(4)]
    A = Connection(*comps)
    eta = bpst_eta()
    # measure the global sign at a generic point
    z1, z2 = np.array([0.7 + 0.2j]), np.array([-0.3 + 0.5j])
    F = curvature(A)(z1, z2).data
    pd = eta.form.d()(z1, z2).data * (mu / (abs(z1[0]) ** 2 + abs(z2[0]) ** 2 + mu) ** 2)
    ratio = np.vdot(pd.ravel(), F.ravel()).real / np.vdot(pd.ravel(), pd.ravel()).real
    sign = 1 if ratio > 0 else -1
    return BPST(params, A, g, eta, f, p, sign)


def profile_ode_residual(f, r) -> np.ndarray:
    """|lambda f' - (f^2 - f) lambda'| with lambda = 1/(2r), derivatives in r.

    ``f`` is a Radial (its derivative is taken exactly) or a pair of callables (f, f').
    """
    r = np.asarray(r, dtype=float)
    if isinstance(f, tuple):
        fv, dfv = np.asarray(f[0](r)), np.asarray(f[1](r))
    else:
        fv = f(r)
        ds = f.derivative()
        dfv = sum((d(r) for d in ds), np.zeros_like(r, dtype=complex))
    lam = 1.0 / (2 * r)
    dlam = -1.0 / (2 * r ** 2)
    return np.abs(lam * dfv - (fv ** 2 - fv) * dlam)


# ---------------------------------------------------------------------------
# gauge normalisation


@dataclass
class NormalizeResult:
    gauge: GaugeMap
    connection: Connection
    normal_form: Connection
    eta_prime: EtaForm
    h_tilde: ExactCoefficient = field(repr=False)
    exactness_gap: float = 0.0
    unitarity_defect: float = 0.0
    normal_form_gap: float = 0.0
    A1_prime_condition: float = 0.0


def gauge_normalize(eta: EtaForm, w=(0j, 0j), mode: str = "minkowski-sd", z1=None, z2=None,
                    tol: float = 1e-8) -> NormalizeResult:
    """Unitary gauge map taking A = eta - eta^* to eta' - eta'^*.

    ``minkowski-sd``: eta' = B(w) dz1 + A2(w1, z2) dz2 with B = (A1 - i A1^*)/2,
    the part of A1 that does not commute with A2 under the condition
    [A1^* - i A1, A2] = i(d1 A2 - d2 A1).  ``flat``: eta' = 0 (closed commuting eta).
    """
    if mode not in ("minkowski-sd", "flat"):
        raise ValueError("mode must be 'minkowski-sd' or 'flat'")
    A1, A2 = eta.A1, eta.A2
    if not (isinstance(A1, ExactCoefficient) and isinstance(A2, ExactCoefficient)):
        raise ValueError("gauge normalisation needs exact coefficients")
    if not (A1.is_holomorphic() and A2.is_holomorphic()):
        raise ValueError("gauge normalisation needs holomorphic eta")
    w1, w2 = complex(w[0]), complex(w[1])
    n = eta.dim
    if z1 is None:
        z1, z2 = sample_points(50, 7)
    z1, z2 = prepare_points(z1, z2)
    if mode == "minkowski-sd":
        a1w = A1(w1, w2)
        Bw = 0.5 * (a1w - 1j * madj(a1w))
        A2w = A2.substitute(0, w1)
        At1 = A1 - constant(Bw)
        At2 = A2 - A2w
        eta_p = EtaForm(constant(Bw), A2w, holomorphic=True, normal=True)
    else:
        At1, At2 = A1, A2
        eta_p = EtaForm(zero(n), zero(n), holomorphic=True, normal=True)
    gap = _maxnorm((At1.wirtinger(1) - At2.wirtinger(0))(z1, z2))
    scale = max(1.0, _maxnorm(At1.wirtinger(1)(z1, z2)))
    if gap > tol * scale:
        raise ValueError(f"eta-tilde is not closed (gap {gap:.3g}); the condition does not hold")
    G1 = At1.antiderivative(0)
    part1 = G1 - G1.substitute(0, w1)
    G2 = At2.substitute(0, w1).antiderivative(1)
    part2 = G2 - G2.substitute(1, w2)
    h_t = part1 + part2
    g = expm(h_t.adjoint() - h_t, commuting=True)
    gm = GaugeMap(g, unitary=True)
    A = from_eta(eta)
    Ag = gauge_transform(A, gm)
    normal_form = from_eta(eta_p)
    nf_gap = max(_maxnorm(a(z1, z2) - b(z1, z2)) for a, b in zip(Ag.components(), normal_form.components()))
    a1p = eta_p.A1(0.0, 0.0)
    cond = float(np.linalg.norm(madj(a1p) - 1j * a1p))
    return NormalizeResult(gm, Ag, normal_form, eta_p, h_t, gap, float(np.max(gm.unitarity_defect(z1, z2))),
                           nf_gap, cond)
