"""Metric pairing, volume form, Hodge star and inner products of forms.

The star is not hard-coded: for every basis p-form ``b`` it is the unique
(4-p)-form with ``e ^ *b = <e, conj(b)> vol`` for all basis p-forms ``e``,
obtained by solving a small signed-permutation system.  Pairings of
p-forms are Gram determinants of the generator pairing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import TraceKind
from .coefficients import CONJ, prepare_points
from .forms import FormField, FormValue, basis, basis_index, sort_sign

__all__ = [
    "MetricKind",
    "Metric",
    "EUCLIDEAN",
    "MINKOWSKI",
    "get_metric",
    "metric_pairing",
    "form_pairing",
    "StarTable",
    "build_star_table",
    "star",
    "DualityClass",
    "classify_duality",
    "self_dual_eigenvalue",
    "pointwise_inner",
    "QuadratureSpec",
    "quadrature_nodes",
    "integrate",
    "global_inner",
    "VOL_COEF",
]

# real cotangent vectors of the generators dz1, dz2, dzb1, dzb2 in the dx basis
_V = np.array(
    [
        [1, 1j, 0, 0],
        [0, 0, 1, 1j],
        [1, -1j, 0, 0],
        [0, 0, 1, -1j],
    ],
    dtype=complex,
)


class MetricKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    MINKOWSKI = "minkowski"


@dataclass(frozen=True)
class Metric:
    kind: MetricKind
    diag: tuple

    @property
    def g(self) -> np.ndarray:
        return np.diag(np.asarray(self.diag, dtype=float))

    @property
    def g_inv(self) -> np.ndarray:
        return np.diag(1.0 / np.asarray(self.diag, dtype=float))

    @property
    def sqrt_abs_det(self) -> float:
        return float(np.sqrt(abs(np.prod(self.diag))))

    @property
    def name(self) -> str:
        return self.kind.value


EUCLIDEAN = Metric(MetricKind.EUCLIDEAN, (1.0, 1.0, 1.0, 1.0))
# The signature with +1 on x0 is the one whose star reproduces the Minkowski
# eigenbases, the 1-form display and *vol = -4 simultaneously; diag(-1,1,1,1)
# gets the 1-form star wrong by a sign.
MINKOWSKI = Metric(MetricKind.MINKOWSKI, (1.0, -1.0, -1.0, -1.0))


def get_metric(m) -> Metric:
    if isinstance(m, Metric):
        return m
    if isinstance(m, MetricKind):
        return EUCLIDEAN if m is MetricKind.EUCLIDEAN else MINKOWSKI
    key = str(m).lower()
    if key in ("euclidean", "e", "euclid"):
        return EUCLIDEAN
    if key in ("minkowski", "m", "mink"):
        return MINKOWSKI
    raise ValueError(f"unknown metric {m!r}; expected 'euclidean' or 'minkowski'")


@lru_cache(maxsize=None)
def _generator_gram(m: Metric) -> np.ndarray:
    return _V @ m.g_inv @ _V.conj().T


def metric_pairing(a: int, b: int, m=EUCLIDEAN) -> complex:
    """<a, b> for generators a, b in 0..3 (dz1, dz2, dzb1, dzb2)."""
    return complex(_generator_gram(get_metric(m))[a, b])


def form_pairing(e, f, m=EUCLIDEAN) -> complex:
    """<e, f> for two generator sequences of equal length (Gram determinant)."""
    e, f = tuple(e), tuple(f)
    if len(e) != len(f):
        raise ValueError("pairing needs equal degrees")
    if not e:
        return 1.0 + 0j
    G = _generator_gram(get_metric(m))
    return complex(np.linalg.det(G[np.ix_(e, f)]))


# vol = (i/2)^2 sqrt|det g| dz1^dzb1^dz2^dzb2; reorder to canonical dz1^dz2^dzb1^dzb2
_, _VOL_SIGN = sort_sign((0, 2, 1, 3))
VOL_COEF = (0.5j) ** 2 * _VOL_SIGN  # times sqrt|det g|


@dataclass(frozen=True)
class StarTable:
    """``tables[p]`` maps the coefficient vector of a p-form to that of its star."""

    metric: Metric
    vol: complex
    tables: dict = field(repr=False)

    def image(self, b) -> dict:
        """*b for one basis form, as {basis (4-p): scalar}."""
        b = tuple(b)
        p = len(b)
        col = self.tables[p][:, basis_index(b)]
        return {basis(4 - p)[k]: complex(v) for k, v in enumerate(col) if v != 0}


@lru_cache(maxsize=None)
def _build(m: Metric) -> StarTable:
    vol = VOL_COEF * m.sqrt_abs_det
    tables = {}
    for p in range(5):
        bp, bq = basis(p), basis(4 - p)
        W = np.zeros((len(bp), len(bq)))
        for i, e in enumerate(bp):
            for k, c in enumerate(bq):
                _, sign = sort_sign(e + c)
                W[i, k] = sign
        S = np.zeros((len(bq), len(bp)), dtype=complex)
        for j, b in enumerate(bp):
            bbar = tuple(CONJ[g] for g in b)
            rhs = np.array([form_pairing(e, bbar, m) * vol for e in bp])
            S[:, j] = np.linalg.solve(W, rhs)
        tables[p] = S
    return StarTable(m, complex(vol), tables)


def build_star_table(m=EUCLIDEAN) -> StarTable:
    m = get_metric(m)
    t = _build(m)
    for p in range(5):
        if not np.all(np.isfinite(t.tables[p])):
            raise ArithmeticError(f"singular pairing for metric {m.name}")
    return t


def star(mu, m=EUCLIDEAN):
    """Hodge star of a FormField or FormValue."""
    table = build_star_table(m).tables[mu.degree]
    q = 4 - mu.degree
    if isinstance(mu, FormValue):
        data = np.einsum("ki,...ijl->...kjl", table, mu.data)
        return FormValue(q, data)
    coeffs = {}
    for b, c in mu.coeffs.items():
        j = basis_index(b)
        for k in np.nonzero(table[:, j])[0]:
            term = c * complex(table[k, j])
            key = basis(q)[k]
            coeffs[key] = coeffs[key] + term if key in coeffs else term
    return FormField(q, mu.dim, coeffs)


class DualityClass(enum.Enum):
    SD = "SD"
    ASD = "ASD"
    MIXED = "mixed"
    ZERO = "zero"


def self_dual_eigenvalue(m) -> complex:
    return 1.0 if get_metric(m).kind is MetricKind.EUCLIDEAN else 1j


def classify_duality(omega: FormValue, m=EUCLIDEAN, tol: float = 1e-10) -> DualityClass:
    """SD / ASD / zero / mixed for a 2-form, over its whole batch of points."""
    if omega.degree != 2:
        raise ValueError("duality is defined for 2-forms")
    lam = self_dual_eigenvalue(m)
    norm = np.linalg.norm(omega.data)
    if norm <= tol:
        return DualityClass.ZERO
    so = star(omega, m).data
    if np.linalg.norm(so - lam * omega.data) <= tol * norm:
        return DualityClass.SD
    if np.linalg.norm(so + lam * omega.data) <= tol * norm:
        return DualityClass.ASD
    return DualityClass.MIXED


def pointwise_inner(mu: FormValue, eta: FormValue, m=EUCLIDEAN, kind=TraceKind.MATRIX):
    """Scalar multiplying vol in Tr(mu ^ *(eta^*)), per point."""
    if mu.degree != eta.degree:
        raise ValueError(f"degree mismatch: {mu.degree} vs {eta.degree}")
    top = mu.wedge(star(eta.adjoint(), m))
    t = np.trace(top.data[..., 0, :, :], axis1=-2, axis2=-1)
    if TraceKind.parse(kind) is TraceKind.STATE:
        t = t / mu.dim
    return t / build_star_table(m).vol


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration grid over [-R, R]^4.

    ``gauss`` and ``midpoint`` are tensor rules with ``nodes_per_axis``
    points per real axis.  ``radial`` integrates functions of |x| only:
    Gauss nodes in the radius times a fixed set of unit directions.
    """

    radius: float = 6.0
    nodes_per_axis: int = 16
    rule: str = "gauss"
    directions: int = 8
    chunk: int = 8192

    def __post_init__(self):
        if self.radius <= 0 or self.nodes_per_axis < 1:
            raise ValueError("quadrature needs radius > 0 and at least one node")
        if self.rule not in ("gauss", "midpoint", "radial"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")

    @classmethod
    def from_json(cls, data: dict) -> "QuadratureSpec":
        allowed = {"radius", "nodes_per_axis", "rule", "directions"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown quadrature fields {sorted(extra)}")
        return cls(**data)

    def to_json(self) -> dict:
        out = {"radius": self.radius, "nodes_per_axis": self.nodes_per_axis, "rule": self.rule}
        if self.rule == "radial":
            out["directions"] = self.directions
        return out


@lru_cache(maxsize=32)
def quadrature_nodes(q: QuadratureSpec):
    """(z1, z2, weights) flat arrays for the rule."""
    n, R = q.nodes_per_axis, q.radius
    if q.rule == "radial":
        t, w = np.polynomial.legendre.leggauss(n)
        rho = 0.5 * R * (t + 1)
        wr = 0.5 * R * w * 2 * np.pi ** 2 * rho ** 3
        rng = np.random.default_rng(12345)
        dirs = rng.normal(size=(q.directions, 4))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        x = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 4)
        wt = np.repeat(wr / q.directions, q.directions)
    else:
        if q.rule == "gauss":
            t, w = np.polynomial.legendre.leggauss(n)
            t, w = R * t, R * w
        else:
            h = 2 * R / n
            t = -R + h * (np.arange(n) + 0.5)
            w = np.full(n, h)
        grids = np.meshgrid(t, t, t, t, indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=1)
        wg = np.meshgrid(w, w, w, w, indexing="ij")
        wt = wg[0].ravel() * wg[1].ravel() * wg[2].ravel() * wg[3].ravel()
    z1 = x[:, 0] + 1j * x[:, 1]
    z2 = x[:, 2] + 1j * x[:, 3]
    for a in (z1, z2, wt):
        a.setflags(write=False)
    return z1, z2, wt


def integrate(func, quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """Integrate a scalar function ``func(z1, z2) -> values`` over the grid."""
    z1, z2, wt = quadrature_nodes(quad)
    total = 0j
    for s in range(0, len(wt), quad.chunk):
        a, b, w = z1[s:s + quad.chunk], z2[s:s + quad.chunk], wt[s:s + quad.chunk]
        v = np.asarray(func(a, b))
        bad = ~np.isfinite(v)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise FloatingPointError(f"non-finite integrand at z=({a[i]:.6g}, {b[i]:.6g})")
        total += complex(np.sum(w * v))
    return total


def global_inner(mu, eta, m=EUCLIDEAN, quad: QuadratureSpec = QuadratureSpec(), kind=TraceKind.MATRIX):
    """(mu, eta): integral of the pointwise inner product.

    ``mu`` and ``eta`` are FormFields or callables ``(z1, z2) -> FormValue``.
    """
    if isinstance(mu, FormField) and isinstance(eta, FormField) and mu.degree != eta.degree:
        raise ValueError(f"degree mismatch: {mu.degree} vs {eta.degree}")

    def density(z1, z2):
        z1, z2 = prepare_points(z1, z2)
        a = mu(z1, z2)
        b = a if eta is mu else eta(z1, z2)
        return pointwise_inner(a, b, m, kind)

    return integrate(density, quad)
