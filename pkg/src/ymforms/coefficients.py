"""Matrix-valued coefficient functions on C^2 and their Wirtinger derivatives.

Two families live here.

``ExactCoefficient`` is a finite sum of terms

    M * z1^a z2^b zb1^c zb2^d * exp(c1 z1 + c2 z2 + c3 zb1 + c4 zb2) * phi(r)

with ``M`` a constant matrix and ``phi`` an optional radial factor
(``r = |z1|^2 + |z2|^2``).  The set is closed under sums, products, adjoints
and all four Wirtinger derivatives, so curvature and currents of such
connections are computed with no discretisation error.

Everything else is a tree of nodes (sum, product, inverse, expm, adjoint)
over ``FunctionCoefficient`` leaves, whose derivatives fall back to central
differences in the real coordinates.

Generator index convention: 0 = z1, 1 = z2, 2 = zb1, 3 = zb2.
"""
from __future__ import annotations

import math
from numbers import Number
from typing import Callable

import numpy as np
import scipy.linalg

from .algebra import matrix_from_json, matrix_to_json
from .radial import Radial, multiply as radial_mul

__all__ = [
    "Coefficient",
    "ExactCoefficient",
    "FunctionCoefficient",
    "SingularValueError",
    "constant",
    "zero",
    "variable",
    "monomial",
    "exp_term",
    "radial_term",
    "poly",
    "poly_to_json",
    "poly_from_json",
    "inverse",
    "expm",
    "as_coefficient",
    "prepare_points",
    "fd_wirtinger",
]

CONJ = (2, 3, 0, 1)
_ZERO4 = (0, 0, 0, 0)
_ZEROC = (0j, 0j, 0j, 0j)


class SingularValueError(FloatingPointError):
    """A matrix that had to be inverted is singular at some point."""

    def __init__(self, z1, z2, cond):
        self.location = (complex(z1), complex(z2))
        super().__init__(f"singular matrix at z=({z1:.6g}, {z2:.6g}), cond={cond:.3g}")


def prepare_points(z1, z2):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.broadcast_arrays(z1, z2)


class Coefficient:
    """Base class: a map (z1, z2) -> n x n complex matrices, vectorised."""

    __array_ufunc__ = None
    dim: int
    exact = False

    def __call__(self, z1, z2) -> np.ndarray:
        raise NotImplementedError

    def wirtinger(self, k: int) -> "Coefficient":
        raise NotImplementedError

    def adjoint(self) -> "Coefficient":
        return AdjointNode(self)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_coefficient(other, self.dim)
        if other is None:
            return NotImplemented
        _check_dim(self, other)
        if self.exact and other.exact:
            return self._add_exact(other)
        return SumNode([self, other])

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        other = as_coefficient(other, self.dim)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return ScaleNode(complex(c), self)

    __rmul__ = __mul__

    def __matmul__(self, other):
        other = as_coefficient(other, self.dim)
        if other is None:
            return NotImplemented
        _check_dim(self, other)
        if self.exact and other.exact:
            return self._matmul_exact(other)
        return ProductNode(self, other)

    def __rmatmul__(self, other):
        other = as_coefficient(other, self.dim)
        if other is None:
            return NotImplemented
        return other.__matmul__(self)

    def is_zero(self) -> bool:
        return False


def _check_dim(a, b):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def as_coefficient(x, dim: int | None = None) -> Coefficient | None:
    """Coerce a coefficient, constant matrix or scalar (times identity)."""
    if isinstance(x, Coefficient):
        return x
    if isinstance(x, Number):
        if dim is None:
            raise ValueError("scalar needs a dimension")
        return constant(complex(x) * np.eye(dim))
    if isinstance(x, np.ndarray) or isinstance(x, (list, tuple)):
        return constant(x)
    return None


# ---------------------------------------------------------------------------
# exact terms


class ExactCoefficient(Coefficient):
    """Finite sum of matrix * monomial * exponential * radial terms."""

    exact = True

    def __init__(self, terms: dict, dim: int):
        self.dim = int(dim)
        self.terms = {}
        for key, m in terms.items():
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"term matrix shape {m.shape} != ({dim}, {dim})")
            if np.any(m != 0):
                self.terms[key] = m

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return f"ExactCoefficient(dim={self.dim}, terms={len(self.terms)})"

    # evaluation -----------------------------------------------------------
    def __call__(self, z1, z2):
        z1, z2 = prepare_points(z1, z2)
        shape = z1.shape
        out = np.zeros(shape + (self.dim, self.dim), dtype=complex)
        if not self.terms:
            return out
        zs = (z1, z2, np.conj(z1), np.conj(z2))
        r = None
        pow_cache: dict = {}
        rad_cache: dict = {}
        exp_cache: dict = {}

        def zpow(k, a):
            if a == 0:
                return None
            key = (k, a)
            if key not in pow_cache:
                pow_cache[key] = zs[k] ** a
            return pow_cache[key]

        T = len(self.terms)
        S = np.empty(shape + (T,), dtype=complex)
        M = np.empty((T, self.dim * self.dim), dtype=complex)
        for t, ((pw, ex, rad), m) in enumerate(self.terms.items()):
            s = None
            for k in range(4):
                p = zpow(k, pw[k])
                if p is not None:
                    s = p if s is None else s * p
            if ex != _ZEROC:
                if ex not in exp_cache:
                    exp_cache[ex] = np.exp(sum(c * zs[k] for k, c in enumerate(ex) if c != 0))
                s = exp_cache[ex] if s is None else s * exp_cache[ex]
            if rad is not None:
                if r is None:
                    r = (np.abs(z1) ** 2 + np.abs(z2) ** 2).real
                if rad not in rad_cache:
                    rad_cache[rad] = rad(r)
                s = rad_cache[rad] if s is None else s * rad_cache[rad]
            S[..., t] = 1.0 if s is None else s
            M[t] = m.ravel()
        return (S.reshape(-1, T) @ M).reshape(shape + (self.dim, self.dim))

    # algebra --------------------------------------------------------------
    def _add_exact(self, other):
        terms = dict(self.terms)
        for key, m in other.terms.items():
            terms[key] = terms[key] + m if key in terms else m
        return ExactCoefficient(terms, self.dim)

    def __mul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        c = complex(c)
        return ExactCoefficient({k: c * m for k, m in self.terms.items()}, self.dim)

    __rmul__ = __mul__

    def _matmul_exact(self, other):
        terms: dict = {}
        for (p1, e1, r1), m1 in self.terms.items():
            for (p2, e2, r2), m2 in other.terms.items():
                key = (
                    tuple(a + b for a, b in zip(p1, p2)),
                    tuple(a + b for a, b in zip(e1, e2)),
                    radial_mul(r1, r2),
                )
                m = m1 @ m2
                terms[key] = terms[key] + m if key in terms else m
        return ExactCoefficient(terms, self.dim)

    def adjoint(self):
        terms = {}
        for (pw, ex, rad), m in self.terms.items():
            key = (
                (pw[2], pw[3], pw[0], pw[1]),
                tuple(complex(np.conj(ex[CONJ[k]])) for k in range(4)),
                None if rad is None else rad.conj(),
            )
            terms[key] = np.conj(m.T)
        return ExactCoefficient(terms, self.dim)

    def wirtinger(self, k: int):
        """Exact derivative: 0, 1 -> d/dz_k; 2, 3 -> d/dzb_(k-2)."""
        if k not in (0, 1, 2, 3):
            raise ValueError(f"Wirtinger index must be 0..3, got {k}")
        terms: dict = {}

        def put(key, m):
            terms[key] = terms[key] + m if key in terms else m

        for (pw, ex, rad), m in self.terms.items():
            if pw[k]:
                npw = list(pw)
                npw[k] -= 1
                put((tuple(npw), ex, rad), pw[k] * m)
            if ex[k] != 0:
                put((pw, ex, rad), ex[k] * m)
            if rad is not None:
                # d/dz_k phi(r) = phi'(r) * conj(z_k)
                npw = list(pw)
                npw[CONJ[k]] += 1
                for d in rad.derivative():
                    put((tuple(npw), ex, d), m)
        return ExactCoefficient(terms, self.dim)

    # structure ------------------------------------------------------------
    def is_holomorphic(self) -> bool:
        for pw, ex, rad in self.terms:
            if pw[2] or pw[3] or ex[2] != 0 or ex[3] != 0 or rad is not None:
                return False
        return True

    def is_polynomial(self) -> bool:
        return all(ex == _ZEROC and rad is None for _, ex, rad in self.terms)

    def times_matrix(self, mat) -> "ExactCoefficient":
        """For a scalar (dim 1) coefficient s, return s(z) * mat."""
        if self.dim != 1:
            raise ValueError("times_matrix needs a scalar coefficient")
        mat = np.asarray(mat, dtype=complex)
        return ExactCoefficient({k: m[0, 0] * mat for k, m in self.terms.items()}, mat.shape[0])

    def antiderivative(self, k: int) -> "ExactCoefficient":
        """Holomorphic antiderivative in z_k (k = 0 or 1), vanishing at z_k = 0.

        Handles monomials and monomial * exp(c z_k); radial terms and
        antiholomorphic dependence on z_k are rejected.
        """
        if k not in (0, 1):
            raise ValueError("antiderivative only in z1 or z2")
        kb = CONJ[k]
        terms: dict = {}

        def put(key, m):
            terms[key] = terms[key] + m if key in terms else m

        for (pw, ex, rad), m in self.terms.items():
            if rad is not None or pw[kb] or ex[kb] != 0:
                raise ValueError("term is not holomorphic in the integration variable")
            a, c = pw[k], ex[k]
            if c == 0:
                npw = list(pw)
                npw[k] = a + 1
                put((tuple(npw), ex, rad), m / (a + 1))
                continue
            # int z^a e^{cz} = e^{cz} sum_j (-1)^j a!/(a-j)! z^{a-j} / c^{j+1}
            for j in range(a + 1):
                npw = list(pw)
                npw[k] = a - j
                coef = (-1) ** j * math.perm(a, j) / c ** (j + 1)
                put((tuple(npw), ex, rad), coef * m)
            # constant of integration so that the result vanishes at z_k = 0
            rest_ex = list(ex)
            rest_ex[k] = 0j
            npw = list(pw)
            npw[k] = 0
            base = (-1) ** a * math.factorial(a) / c ** (a + 1)
            put((tuple(npw), tuple(rest_ex), rad), -base * m)
        return ExactCoefficient(terms, self.dim)

    def substitute(self, k: int, w: complex) -> "ExactCoefficient":
        """Set z_k = w (and zb_k = conj(w)); k = 0 or 1."""
        if k not in (0, 1):
            raise ValueError("substitute only for z1 or z2")
        kb = CONJ[k]
        w = complex(w)
        terms: dict = {}
        for (pw, ex, rad), m in self.terms.items():
            if rad is not None:
                raise ValueError("cannot substitute into a radial term")
            factor = w ** pw[k] * np.conj(w) ** pw[kb] * np.exp(ex[k] * w + ex[kb] * np.conj(w))
            npw = list(pw)
            npw[k] = npw[kb] = 0
            nex = list(ex)
            nex[k] = nex[kb] = 0j
            key = (tuple(npw), tuple(nex), None)
            terms[key] = terms[key] + factor * m if key in terms else factor * m
        return ExactCoefficient(terms, self.dim)


def _key(powers=_ZERO4, expc=_ZEROC, rad: Radial | None = None):
    powers = tuple(int(p) for p in powers)
    if len(powers) != 4 or any(p < 0 for p in powers):
        raise ValueError(f"powers must be four nonnegative integers, got {powers}")
    expc = tuple(complex(c) for c in expc)
    if len(expc) != 4:
        raise ValueError("exponent coefficients must have length 4")
    return (powers, expc, rad)


def constant(mat) -> ExactCoefficient:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return ExactCoefficient({_key(): mat}, mat.shape[0])


def zero(dim: int) -> ExactCoefficient:
    return ExactCoefficient({}, dim)


def monomial(powers, mat) -> ExactCoefficient:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return ExactCoefficient({_key(powers): mat}, mat.shape[0])


def variable(k: int, dim: int = 1) -> ExactCoefficient:
    """z1, z2, zb1 or zb2 (k = 0..3) times the identity."""
    pw = [0, 0, 0, 0]
    pw[k] = 1
    return monomial(pw, np.eye(dim))


def exp_term(expc, mat, powers=_ZERO4) -> ExactCoefficient:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return ExactCoefficient({_key(powers, expc): mat}, mat.shape[0])


def radial_term(rad: Radial, mat, powers=_ZERO4) -> ExactCoefficient:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return ExactCoefficient({_key(powers, _ZEROC, rad): mat}, mat.shape[0])


def poly(terms, dim: int | None = None) -> ExactCoefficient:
    """Polynomial coefficient from ``[(powers, matrix), ...]``."""
    out = None
    for powers, mat in terms:
        t = monomial(powers, mat)
        out = t if out is None else out + t
    if out is None:
        if dim is None:
            raise ValueError("empty polynomial needs a dimension")
        return zero(dim)
    if dim is not None and out.dim != dim:
        raise ValueError(f"expected dimension {dim}, got {out.dim}")
    return out


def poly_to_json(c: ExactCoefficient) -> list:
    if not c.is_polynomial():
        raise ValueError("only polynomial coefficients serialise")
    return [{"powers": list(pw), "matrix": matrix_to_json(m)} for (pw, _, _), m in c.terms.items()]


def poly_from_json(data, dim: int | None = None) -> ExactCoefficient:
    if not isinstance(data, list):
        raise ValueError("polynomial coefficient must be a list of terms")
    terms = []
    for i, t in enumerate(data):
        if not isinstance(t, dict) or "powers" not in t or "matrix" not in t:
            raise ValueError(f"term {i}: expected keys 'powers' and 'matrix'")
        terms.append((t["powers"], matrix_from_json(t["matrix"], dim)))
    return poly(terms, dim)


# ---------------------------------------------------------------------------
# numeric nodes


def fd_wirtinger(func: Callable, z1, z2, k: int, h: float = 1e-5, richardson: bool = False):
    """Central-difference Wirtinger derivative of ``func`` at the given points.

    d/dz = (d/dx - i d/dy)/2 and d/dzb = (d/dx + i d/dy)/2, each real partial
    taken by a central difference of step ``h``.
    """
    z1, z2 = prepare_points(z1, z2)
    scale = max(1.0, float(np.max(np.abs(z1), initial=0)), float(np.max(np.abs(z2), initial=0)))
    if not h > 4 * np.finfo(float).eps * scale:
        raise FloatingPointError(f"finite-difference step {h!r} underflows at |z| ~ {scale:.3g}")
    var = k % 2
    sign = -1.0 if k < 2 else 1.0

    def once(step):
        def shifted(d):
            if var == 0:
                return func(z1 + d, z2)
            return func(z1, z2 + d)

        dx = (shifted(step) - shifted(-step)) / (2 * step)
        dy = (shifted(1j * step) - shifted(-1j * step)) / (2 * step)
        return 0.5 * (dx + sign * 1j * dy)

    d = once(h)
    if richardson:
        d = (4 * once(h / 2) - d) / 3
    return d


class FunctionCoefficient(Coefficient):
    """Arbitrary callable ``f(z1, z2) -> (..., n, n)``.

    Derivatives are supplied closed-form through ``derivatives`` (a dict
    k -> Coefficient) or else taken by central differences.
    """

    def __init__(self, func: Callable, dim: int, h: float = 1e-5, richardson: bool = False,
                 derivatives: dict | None = None, name: str = "f"):
        self.func = func
        self.dim = int(dim)
        self.h = h
        self.richardson = richardson
        self.derivatives = dict(derivatives or {})
        self.name = name

    def __call__(self, z1, z2):
        z1, z2 = prepare_points(z1, z2)
        out = np.asarray(self.func(z1, z2), dtype=complex)
        return np.broadcast_to(out, z1.shape + (self.dim, self.dim))

    def wirtinger(self, k):
        if k in self.derivatives:
            return self.derivatives[k]
        return FunctionCoefficient(
            lambda a, b: fd_wirtinger(self, a, b, k, self.h, self.richardson),
            self.dim, self.h, self.richardson, name=f"d{k}({self.name})",
        )

    def __repr__(self):
        return f"FunctionCoefficient({self.name}, dim={self.dim})"


class SumNode(Coefficient):
    def __init__(self, children):
        self.children = list(children)
        self.dim = self.children[0].dim

    def __call__(self, z1, z2):
        out = self.children[0](z1, z2)
        for c in self.children[1:]:
            out = out + c(z1, z2)
        return out

    def wirtinger(self, k):
        parts = [c.wirtinger(k) for c in self.children]
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out

    def adjoint(self):
        parts = [c.adjoint() for c in self.children]
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out


class ScaleNode(Coefficient):
    def __init__(self, c: complex, child: Coefficient):
        self.c = c
        self.child = child
        self.dim = child.dim

    def __call__(self, z1, z2):
        return self.c * self.child(z1, z2)

    def wirtinger(self, k):
        return self.child.wirtinger(k) * self.c

    def adjoint(self):
        return self.child.adjoint() * np.conj(self.c)


class ProductNode(Coefficient):
    def __init__(self, a: Coefficient, b: Coefficient):
        self.a, self.b = a, b
        self.dim = a.dim

    def __call__(self, z1, z2):
        return self.a(z1, z2) @ self.b(z1, z2)

    def wirtinger(self, k):
        return self.a.wirtinger(k) @ self.b + self.a @ self.b.wirtinger(k)

    def adjoint(self):
        return self.b.adjoint() @ self.a.adjoint()


class AdjointNode(Coefficient):
    def __init__(self, child: Coefficient):
        self.child = child
        self.dim = child.dim

    def __call__(self, z1, z2):
        return np.conj(np.swapaxes(self.child(z1, z2), -1, -2))

    def wirtinger(self, k):
        # d/dz (f*) = (d/dzb f)*
        return self.child.wirtinger(CONJ[k]).adjoint()

    def adjoint(self):
        return self.child


class InverseNode(Coefficient):
    """Pointwise matrix inverse; raises ``SingularValueError`` with the location."""

    cond_limit = 1e13

    def __init__(self, child: Coefficient):
        self.child = child
        self.dim = child.dim

    def __call__(self, z1, z2):
        z1, z2 = prepare_points(z1, z2)
        m = self.child(z1, z2)
        cond = np.linalg.cond(m)
        bad = ~np.isfinite(cond) | (cond > self.cond_limit)
        if np.any(bad):
            idx = np.unravel_index(np.argmax(bad), bad.shape) if bad.ndim else ()
            raise SingularValueError(z1[idx], z2[idx], float(np.asarray(cond)[idx]))
        return np.linalg.inv(m)

    def wirtinger(self, k):
        return -1.0 * (self @ self.child.wirtinger(k) @ self)

    def adjoint(self):
        return InverseNode(self.child.adjoint())


class ExpmNode(Coefficient):
    """Pointwise matrix exponential.

    With ``commuting=True`` the caller promises that M(z) commutes with its
    own derivatives, so d exp(M) = exp(M) dM exactly; otherwise derivatives
    are finite differences.
    """

    def __init__(self, child: Coefficient, commuting: bool = False, h: float = 1e-5):
        self.child = child
        self.commuting = commuting
        self.h = h
        self.dim = child.dim

    def __call__(self, z1, z2):
        m = self.child(z1, z2)
        flat = m.reshape(-1, self.dim, self.dim)
        out = np.empty_like(flat)
        for i, a in enumerate(flat):
            out[i] = scipy.linalg.expm(a)
        return out.reshape(m.shape)

    def wirtinger(self, k):
        if self.commuting:
            return self @ self.child.wirtinger(k)
        return FunctionCoefficient(
            lambda a, b: fd_wirtinger(self, a, b, k, self.h, True), self.dim, self.h,
            name=f"d{k}(expm)",
        )

    def adjoint(self):
        return ExpmNode(self.child.adjoint(), self.commuting, self.h)


def inverse(c: Coefficient) -> Coefficient:
    if isinstance(c, ExactCoefficient) and len(c.terms) == 1:
        ((pw, ex, rad), m), = c.terms.items()
        if pw == _ZERO4 and ex == _ZEROC and rad is None:
            return constant(np.linalg.inv(m))
    return InverseNode(c)


def expm(c: Coefficient, commuting: bool = False) -> Coefficient:
    return ExpmNode(c, commuting)
