"""Connections, curvature, covariant derivatives, currents and gauge maps.

Components are indexed the same way throughout: ``A1, A2`` multiply
``dz1, dz2`` and ``A1b, A2b`` multiply ``dzb1, dzb2``.  The curvature
component ``F_{j kbar}`` is the coefficient of ``dz_j ^ dzb_k``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .coefficients import Coefficient, as_coefficient, inverse, prepare_points, zero
from .forms import FormField, FormValue
from .hodge import MetricKind, classify_duality, get_metric, star

__all__ = [
    "Connection",
    "Curvature",
    "CurrentForm",
    "GaugeMap",
    "curvature",
    "covariant_d",
    "covariant_costar",
    "current",
    "current_closed_form",
    "lorenz_residual",
    "gauge_transform",
    "ym_residuals",
    "sample_points",
    "sample_points_shell",
    "residual_report_csv",
    "comm",
]


def comm(a: Coefficient, b: Coefficient) -> Coefficient:
    return a @ b - b @ a


@dataclass(frozen=True)
class Connection:
    A1: Coefficient
    A2: Coefficient
    A1b: Coefficient
    A2b: Coefficient

    @property
    def dim(self) -> int:
        return self.A1.dim

    @property
    def form(self) -> FormField:
        return FormField.one_form(self.A1, self.A2, self.A1b, self.A2b, dim=self.dim)

    @classmethod
    def from_form(cls, a: FormField) -> "Connection":
        if a.degree != 1:
            raise ValueError("a connection is a 1-form")
        return cls(*(a.component((k,)) for k in range(4)))

    @classmethod
    def make(cls, A1, A2=None, A1b=None, A2b=None, dim: int | None = None) -> "Connection":
        comps = [A1, A2, A1b, A2b]
        if dim is None:
            dim = next(as_coefficient(c).dim for c in comps if c is not None)
        comps = [zero(dim) if c is None else as_coefficient(c, dim) for c in comps]
        return cls(*comps)

    def components(self) -> tuple:
        return (self.A1, self.A2, self.A1b, self.A2b)

    def adjoint(self) -> "Connection":
        """The 1-form A^*, whose dz_k part is (A_kbar)^*."""
        return Connection(self.A1b.adjoint(), self.A2b.adjoint(), self.A1.adjoint(), self.A2.adjoint())

    def __call__(self, z1, z2) -> FormValue:
        return self.form(z1, z2)

    def __add__(self, other: "Connection") -> "Connection":
        return Connection(*(a + b for a, b in zip(self.components(), other.components())))

    def __mul__(self, c) -> "Connection":
        return Connection(*(a * c for a in self.components()))

    __rmul__ = __mul__


class Curvature:
    """F_A as a 2-form, with named component access."""

    def __init__(self, form: FormField):
        if form.degree != 2:
            raise ValueError("curvature is a 2-form")
        self.form = form

    @property
    def dim(self):
        return self.form.dim

    @property
    def F12(self):
        return self.form.component((0, 1))

    @property
    def F1b2b(self):
        return self.form.component((2, 3))

    def F(self, j: int, k: int) -> Coefficient:
        """F_{j kbar}, j, k in {1, 2}."""
        return self.form.component((j - 1, k + 1))

    def __call__(self, z1, z2) -> FormValue:
        return self.form(z1, z2)


def _F_from_components(F12, F1b2b, Fjk, dim) -> FormField:
    coeffs = {(0, 1): F12, (2, 3): F1b2b}
    for (j, k), c in Fjk.items():
        coeffs[(j - 1, k + 1)] = c
    return FormField(2, dim, coeffs)


def curvature(A: Connection, method: str = "generic") -> Curvature:
    """F_A = dA + A ^ A, either through the form calculus or component by component."""
    if method == "generic":
        a = A.form
        return Curvature(a.d() + a.wedge(a))
    if method != "components":
        raise ValueError("method must be 'components' or 'generic'")
    hol = (A.A1, A.A2)
    ahol = (A.A1b, A.A2b)
    F12 = A.A2.wirtinger(0) - A.A1.wirtinger(1) + comm(A.A1, A.A2)
    F1b2b = A.A2b.wirtinger(2) - A.A1b.wirtinger(3) + comm(A.A1b, A.A2b)
    Fjk = {}
    for j in (1, 2):
        for k in (1, 2):
            Aj, Akb = hol[j - 1], ahol[k - 1]
            Fjk[(j, k)] = Akb.wirtinger(j - 1) - Aj.wirtinger(k + 1) + comm(Aj, Akb)
    return Curvature(_F_from_components(F12, F1b2b, Fjk, A.dim))


def covariant_d(A: Connection, T: FormField) -> FormField:
    """D_A T = dT + A ^ T - (-1)^p T ^ A."""
    p = T.degree
    if p > 3:
        raise ValueError("covariant derivative needs degree <= 3")
    a = A.form
    out = T.d() + a.wedge(T)
    return out - T.wedge(a) if p % 2 == 0 else out + T.wedge(a)


def covariant_costar(A: Connection, beta: FormField, m="euclidean") -> FormField:
    """D_A^* beta: -*D_{-A*}* in Euclidean signature, +*D_{-A*}* in Minkowski."""
    m = get_metric(m)
    if beta.degree < 1:
        raise ValueError("co-derivative needs degree >= 1")
    neg_adj = A.adjoint() * -1.0
    out = star(covariant_d(neg_adj, star(beta, m)), m)
    return -out if m.kind is MetricKind.EUCLIDEAN else out


@dataclass(frozen=True)
class CurrentForm:
    J1: Coefficient
    J2: Coefficient
    J1b: Coefficient
    J2b: Coefficient
    metric: MetricKind = MetricKind.EUCLIDEAN

    @property
    def dim(self):
        return self.J1.dim

    @property
    def form(self) -> FormField:
        return FormField.one_form(self.J1, self.J2, self.J1b, self.J2b, dim=self.dim)

    @classmethod
    def from_form(cls, f: FormField, metric=MetricKind.EUCLIDEAN) -> "CurrentForm":
        return cls(*(f.component((k,)) for k in range(4)), metric=get_metric(metric).kind)

    @classmethod
    def zero(cls, dim: int, metric=MetricKind.EUCLIDEAN) -> "CurrentForm":
        z = zero(dim)
        return cls(z, z, z, z, get_metric(metric).kind)

    def components(self):
        return (self.J1, self.J2, self.J1b, self.J2b)


def current_closed_form(A: Connection, m="euclidean", F: Curvature | None = None) -> CurrentForm:
    """The four current components written out term by term."""
    m = get_metric(m)
    F = F or curvature(A, "components")
    A1s, A2s = A.A1.adjoint(), A.A2.adjoint()
    A1bs, A2bs = A.A1b.adjoint(), A.A2b.adjoint()
    F12, F1b2b = F.F12, F.F1b2b
    F11, F12b, F21, F22 = F.F(1, 1), F.F(1, 2), F.F(2, 1), F.F(2, 2)

    def d(c, k):
        return c.wirtinger(k)

    if m.kind is MetricKind.EUCLIDEAN:
        J1 = 2.0 * (d(F11, 0) + d(F12b, 1) + d(F12, 3)
                    - comm(A2s, F12) - comm(A1bs, F11) - comm(A2bs, F12b))
        J2 = -2.0 * (-d(F21, 0) - d(F22, 1) + d(F12, 2)
                     - comm(A1s, F12) + comm(A1bs, F21) + comm(A2bs, F22))
        J1b = 2.0 * (d(F1b2b, 1) - d(F11, 2) - d(F21, 3)
                     + comm(A1s, F11) + comm(A2s, F21) - comm(A2bs, F1b2b))
        J2b = -2.0 * (d(F1b2b, 0) + d(F12b, 2) + d(F22, 3)
                      - comm(A1s, F12b) - comm(A2s, F22) - comm(A1bs, F1b2b))
    else:
        J1 = 2.0 * (-d(F12, 3) + comm(A2s, F12) + d(F11, 2) - comm(A1s, F11)
                    - d(F12b, 1) + comm(A2bs, F12b))
        J2 = 2.0 * (-d(F12, 0) + comm(A1bs, F12) + d(F21, 2) - comm(A1s, F21)
                    - d(F22, 1) + comm(A2bs, F22))
        J1b = 2.0 * (-d(F1b2b, 1) + comm(A2bs, F1b2b) - d(F11, 0) + comm(A1bs, F11)
                     + d(F21, 3) - comm(A2s, F21))
        J2b = 2.0 * (-d(F1b2b, 2) + comm(A1s, F1b2b) - d(F12b, 0) + comm(A1bs, F12b)
                     + d(F22, 3) - comm(A2s, F22))
    return CurrentForm(J1, J2, J1b, J2b, m.kind)


def current(A: Connection, m="euclidean", method: str = "generic") -> CurrentForm:
    """J = D_A^* F_A."""
    m = get_metric(m)
    if method == "closed-form":
        return current_closed_form(A, m)
    if method != "generic":
        raise ValueError("method must be 'closed-form' or 'generic'")
    F = curvature(A, "generic")
    return CurrentForm.from_form(covariant_costar(A, F.form, m), m)


def lorenz_residual(A: Connection, m="euclidean") -> Coefficient:
    """D_A^* A written out as a single matrix-valued function."""
    m = get_metric(m)
    A1, A2, A1b, A2b = A.components()
    if m.kind is MetricKind.EUCLIDEAN:
        s = (A1.wirtinger(2) + A1b.wirtinger(0) + A2.wirtinger(3) + A2b.wirtinger(1)
             + comm(A1, A1.adjoint()) + comm(A2, A2.adjoint())
             + comm(A1b, A1b.adjoint()) + comm(A2b, A2b.adjoint()))
        return -2.0 * s
    s = (A1.wirtinger(0) - A2b.wirtinger(1) + A1b.wirtinger(2) - A2.wirtinger(3)
         + comm(A1, A1b.adjoint()) - comm(A2, A2.adjoint())
         + comm(A1b, A1.adjoint()) - comm(A2b, A2b.adjoint()))
    return -2.0 * s


@dataclass(frozen=True)
class GaugeMap:
    g: Coefficient
    unitary: bool = False
    g_inv: Coefficient | None = None

    @property
    def inv(self) -> Coefficient:
        if self.g_inv is not None:
            return self.g_inv
        return self.g.adjoint() if self.unitary else inverse(self.g)

    def unitarity_defect(self, z1, z2) -> np.ndarray:
        g = self.g(z1, z2)
        eye = np.eye(self.g.dim)
        return np.linalg.norm(np.conj(np.swapaxes(g, -1, -2)) @ g - eye, axis=(-2, -1))


def gauge_transform(A: Connection, gm: GaugeMap) -> Connection:
    """A_g = g^{-1} A g + g^{-1} dg."""
    gi, g = gm.inv, gm.g
    comps = []
    for k, a in enumerate(A.components()):
        comps.append(gi @ a @ g + gi @ g.wirtinger(k))
    return Connection(*comps)


def ym_residuals(A: Connection, J: CurrentForm | None, m, z1, z2, F: Curvature | None = None):
    """Pointwise (||D_A F_A||, ||D_A^* F_A - J||) at the given points."""
    m = get_metric(m)
    F = F or curvature(A, "generic")
    bianchi = covariant_d(A, F.form)
    costar = covariant_costar(A, F.form, m)
    if J is not None:
        costar = costar - J.form
    z1, z2 = prepare_points(z1, z2)
    return bianchi(z1, z2).norm(), costar(z1, z2).norm()


def sample_points(n: int = 100, seed: int = 0, radius: float = 2.0):
    """Seeded uniform points in the polydisk |z1|, |z2| <= radius."""
    rng = np.random.default_rng(seed)
    rho = radius * np.sqrt(rng.uniform(size=(2, n)))
    th = rng.uniform(0, 2 * np.pi, size=(2, n))
    z = rho * np.exp(1j * th)
    return z[0], z[1]


def sample_points_shell(n: int = 100, seed: int = 0, lo: float = 0.1, hi: float = 10.0):
    """Seeded points with |z| log-uniform in [lo, hi] and uniform direction on S^3."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    x *= np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))[:, None]
    return x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]


def residual_report_csv(z1, z2, columns: dict, classification: str | None = None) -> str:
    """CSV text: x0..x3, one column per residual, optional classification."""
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["x0", "x1", "x2", "x3"] + list(columns)
    if classification is not None:
        header.append("classification")
    w.writerow(header)
    z1, z2 = np.ravel(z1), np.ravel(z2)
    for i in range(len(z1)):
        row = [z1[i].real, z1[i].imag, z2[i].real, z2[i].imag]
        row += [float(np.ravel(v)[i]) for v in columns.values()]
        if classification is not None:
            row.append(classification)
        w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def duality_of(A: Connection, m, z1, z2, tol=1e-10):
    return classify_duality(curvature(A)(z1, z2), m, tol)
