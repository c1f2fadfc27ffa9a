"""Matrix-valued complex differential forms on C^2.

Generators are numbered 0..3 = dz1, dz2, dzb1, dzb2, which is also their
canonical order.  A basis p-form is a strictly increasing tuple of generator
indices; coefficients always sit to the left of the generators.

``FormField`` holds one ``Coefficient`` per basis form and supports exact
wedge/adjoint/d.  ``FormValue`` is a form evaluated on a batch of points:
a dense array of shape ``batch + (C(4, p), n, n)``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from numbers import Number

import numpy as np

from .coefficients import CONJ, Coefficient, as_coefficient, prepare_points, zero

__all__ = [
    "DZ1",
    "DZ2",
    "DZB1",
    "DZB2",
    "GENERATOR_NAMES",
    "basis",
    "basis_index",
    "basis_name",
    "parse_basis",
    "sort_sign",
    "wedge_table",
    "adjoint_table",
    "FormValue",
    "FormField",
    "wedge",
    "adjoint_form",
    "exterior_d",
    "wirtinger",
]

DZ1, DZ2, DZB1, DZB2 = 0, 1, 2, 3
GENERATOR_NAMES = ("dz1", "dz2", "dzb1", "dzb2")
_NAME_TO_GEN = {n: i for i, n in enumerate(GENERATOR_NAMES)}
_NAME_TO_GEN.update({"dz̄1": 2, "dz̄2": 3, "dzbar1": 2, "dzbar2": 3})
PARTS = {"d": (0, 1, 2, 3), "del": (0, 1), "delbar": (2, 3)}


@lru_cache(maxsize=None)
def basis(p: int) -> tuple:
    if not 0 <= p <= 4:
        raise ValueError(f"form degree must be in 0..4, got {p}")
    return tuple(itertools.combinations(range(4), p))


@lru_cache(maxsize=None)
def _index_map(p: int) -> dict:
    return {b: i for i, b in enumerate(basis(p))}


def basis_index(b) -> int:
    b = tuple(b)
    return _index_map(len(b))[b]


def basis_name(b) -> str:
    return "1" if not b else "^".join(GENERATOR_NAMES[g] for g in b)


def parse_basis(name: str) -> tuple:
    """'dz1^dzb2' -> (0, 3); tolerates spaces and the wedge symbol."""
    name = name.replace("∧", "^").replace(" ", "")
    if name in ("", "1"):
        return ()
    try:
        gens = [_NAME_TO_GEN[t] for t in name.split("^")]
    except KeyError as exc:
        raise ValueError(f"unknown generator in {name!r}") from exc
    b, s = sort_sign(gens)
    if s != 1:
        raise ValueError(f"basis name {name!r} is not in canonical order")
    return b


def sort_sign(gens) -> tuple:
    """Sort generator indices; return (sorted tuple, permutation sign), or (None, 0) on repeats."""
    gens = list(gens)
    if len(set(gens)) != len(gens):
        return None, 0
    sign = 1
    for i in range(len(gens)):
        for j in range(len(gens) - 1 - i):
            if gens[j] > gens[j + 1]:
                gens[j], gens[j + 1] = gens[j + 1], gens[j]
                sign = -sign
    return tuple(gens), sign


@lru_cache(maxsize=None)
def wedge_table(p: int, q: int) -> tuple:
    """Entries (i, j, k, sign): basis_p[i] ^ basis_q[j] = sign * basis_{p+q}[k]."""
    if p + q > 4:
        raise ValueError(f"wedge of degrees {p} and {q} exceeds 4")
    out = []
    for i, a in enumerate(basis(p)):
        for j, b in enumerate(basis(q)):
            s, sign = sort_sign(a + b)
            if sign:
                out.append((i, j, basis_index(s), sign))
    return tuple(out)


@lru_cache(maxsize=None)
def adjoint_table(p: int) -> tuple:
    """Entry i is (k, sign): conjugating the generators of basis_p[i] in place gives sign * basis_p[k]."""
    out = []
    for b in basis(p):
        s, sign = sort_sign([CONJ[g] for g in b])
        out.append((basis_index(s), sign))
    return tuple(out)


def _key_of(b):
    if isinstance(b, str):
        return parse_basis(b)
    s, sign = sort_sign(b)
    if sign != 1:
        raise ValueError(f"basis {b} is not canonical")
    return s


# ---------------------------------------------------------------------------


class FormValue:
    """A p-form evaluated at a batch of points."""

    def __init__(self, degree: int, data):
        data = np.asarray(data, dtype=complex)
        nb = len(basis(degree))
        if data.ndim < 3 or data.shape[-3] != nb or data.shape[-1] != data.shape[-2]:
            raise ValueError(f"bad FormValue shape {data.shape} for degree {degree}")
        self.degree = degree
        self.data = data

    @property
    def dim(self) -> int:
        return self.data.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.data.shape[:-3]

    @classmethod
    def zeros(cls, degree, dim, batch_shape=()):
        return cls(degree, np.zeros(tuple(batch_shape) + (len(basis(degree)), dim, dim), complex))

    @classmethod
    def from_dict(cls, degree: int, comps: dict, dim: int | None = None):
        """Build from {basis (tuple or name): matrix (or stack of matrices)}."""
        comps = {_key_of(b): np.asarray(m, dtype=complex) for b, m in comps.items()}
        if dim is None:
            if not comps:
                raise ValueError("empty FormValue needs a dimension")
            dim = next(iter(comps.values())).shape[-1]
        batch = np.broadcast_shapes(*(m.shape[:-2] for m in comps.values())) if comps else ()
        out = cls.zeros(degree, dim, batch)
        for b, m in comps.items():
            if len(b) != degree:
                raise ValueError(f"basis {b} has wrong degree for a {degree}-form")
            out.data[..., basis_index(b), :, :] = m
        return out

    def __getitem__(self, b):
        return self.data[..., basis_index(_key_of(b)), :, :]

    def components(self) -> dict:
        return {b: self.data[..., i, :, :] for i, b in enumerate(basis(self.degree))}

    def _same(self, other):
        if not isinstance(other, FormValue) or other.degree != self.degree:
            raise ValueError("forms must have equal degree")

    def __add__(self, other):
        self._same(other)
        return FormValue(self.degree, self.data + other.data)

    def __sub__(self, other):
        self._same(other)
        return FormValue(self.degree, self.data - other.data)

    def __neg__(self):
        return FormValue(self.degree, -self.data)

    def __mul__(self, c):
        if isinstance(c, Number):
            return FormValue(self.degree, c * self.data)
        c = np.asarray(c)
        return FormValue(self.degree, c[..., None, None, None] * self.data)

    __rmul__ = __mul__

    def wedge(self, other: "FormValue") -> "FormValue":
        p, q = self.degree, other.degree
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        table = wedge_table(p, q)
        batch = np.broadcast_shapes(self.batch_shape, other.batch_shape)
        out = np.zeros(batch + (len(basis(p + q)), self.dim, self.dim), complex)
        for i, j, k, sign in table:
            out[..., k, :, :] += sign * (self.data[..., i, :, :] @ other.data[..., j, :, :])
        return FormValue(p + q, out)

    def adjoint(self) -> "FormValue":
        out = np.zeros_like(self.data)
        conjT = np.conj(np.swapaxes(self.data, -1, -2))
        for i, (k, sign) in enumerate(adjoint_table(self.degree)):
            out[..., k, :, :] = sign * conjT[..., i, :, :]
        return FormValue(self.degree, out)

    def norm(self) -> np.ndarray:
        """Sum over basis components of the Frobenius norms, per point."""
        return np.linalg.norm(self.data, axis=(-2, -1)).sum(axis=-1)

    def take(self, idx) -> "FormValue":
        return FormValue(self.degree, self.data[idx])

    def __repr__(self):
        return f"FormValue(degree={self.degree}, dim={self.dim}, batch={self.batch_shape})"


class FormField:
    """A p-form with one coefficient function per (nonzero) basis form."""

    def __init__(self, degree: int, dim: int, coeffs: dict | None = None):
        basis(degree)
        self.degree = degree
        self.dim = int(dim)
        self.coeffs: dict = {}
        for b, c in (coeffs or {}).items():
            b = _key_of(b)
            if len(b) != degree:
                raise ValueError(f"basis {b} has wrong degree for a {degree}-form")
            c = as_coefficient(c, dim)
            if c.dim != self.dim:
                raise ValueError(f"coefficient dimension {c.dim} != {self.dim}")
            if not c.is_zero():
                self.coeffs[b] = c

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, degree, dim):
        return cls(degree, dim)

    @classmethod
    def scalar(cls, coef: Coefficient):
        return cls(0, coef.dim, {(): coef})

    @classmethod
    def one_form(cls, c1, c2, c1b, c2b, dim: int | None = None):
        """c1 dz1 + c2 dz2 + c1b dzb1 + c2b dzb2 (``None`` entries are zero)."""
        comps = [c1, c2, c1b, c2b]
        if dim is None:
            dim = next(as_coefficient(c).dim for c in comps if c is not None)
        return cls(1, dim, {(k,): c for k, c in enumerate(comps) if c is not None})

    def component(self, b) -> Coefficient:
        b = _key_of(b)
        return self.coeffs.get(b) or zero(self.dim)

    def __getitem__(self, b):
        return self.component(b)

    def is_zero(self) -> bool:
        return not self.coeffs

    # evaluation -----------------------------------------------------------
    def __call__(self, z1, z2) -> FormValue:
        z1, z2 = prepare_points(z1, z2)
        out = FormValue.zeros(self.degree, self.dim, z1.shape)
        for b, c in self.coeffs.items():
            out.data[..., basis_index(b), :, :] = c(z1, z2)
        return out

    # algebra --------------------------------------------------------------
    def _same(self, other):
        if not isinstance(other, FormField) or other.degree != self.degree:
            raise ValueError("forms must have equal degree")
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        self._same(other)
        coeffs = dict(self.coeffs)
        for b, c in other.coeffs.items():
            coeffs[b] = coeffs[b] + c if b in coeffs else c
        return FormField(self.degree, self.dim, coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self * -1

    def __mul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return FormField(self.degree, self.dim, {b: v * c for b, v in self.coeffs.items()})

    __rmul__ = __mul__

    def wedge(self, other: "FormField") -> "FormField":
        p, q = self.degree, other.degree
        if p + q > 4:
            raise ValueError(f"wedge of degrees {p} and {q} exceeds 4")
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        coeffs: dict = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                s, sign = sort_sign(a + b)
                if not sign:
                    continue
                term = ca @ cb
                if sign < 0:
                    term = -term
                coeffs[s] = coeffs[s] + term if s in coeffs else term
        return FormField(p + q, self.dim, coeffs)

    def adjoint(self) -> "FormField":
        coeffs = {}
        for b, c in self.coeffs.items():
            s, sign = sort_sign([CONJ[g] for g in b])
            ca = c.adjoint()
            coeffs[s] = ca if sign > 0 else -ca
        return FormField(self.degree, self.dim, coeffs)

    def d(self, part: str = "d") -> "FormField":
        if self.degree >= 4:
            raise ValueError("d of a 4-form is a 5-form, which vanishes on C^2")
        gens = PARTS[part]
        coeffs: dict = {}
        for b, c in self.coeffs.items():
            for k in gens:
                s, sign = sort_sign((k,) + b)
                if not sign:
                    continue
                term = c.wirtinger(k)
                if term.is_zero():
                    continue
                if sign < 0:
                    term = -term
                coeffs[s] = coeffs[s] + term if s in coeffs else term
        return FormField(self.degree + 1, self.dim, coeffs)

    def map_coefficients(self, fn) -> "FormField":
        return FormField(self.degree, self.dim, {b: fn(c) for b, c in self.coeffs.items()})

    def __repr__(self):
        names = ", ".join(basis_name(b) for b in sorted(self.coeffs))
        return f"FormField(degree={self.degree}, dim={self.dim}, [{names}])"


def wedge(mu, nu):
    return mu.wedge(nu)


def adjoint_form(mu):
    return mu.adjoint()


def exterior_d(mu: FormField, part: str = "d") -> FormField:
    if part not in PARTS:
        raise ValueError(f"part must be one of {sorted(PARTS)}")
    return mu.d(part)


_WHICH = {"del1": 0, "del2": 1, "delbar1": 2, "delbar2": 3, "∂1": 0, "∂2": 1, "∂̄1": 2, "∂̄2": 3}


def wirtinger(coef: Coefficient, z1, z2, which) -> np.ndarray:
    """Evaluate one Wirtinger derivative of ``coef`` at points."""
    k = _WHICH[which] if isinstance(which, str) else int(which)
    return coef.wirtinger(k)(z1, z2)
