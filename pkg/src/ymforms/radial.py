"""Scalar functions of ``r = |z1|^2 + |z2|^2``.

A radial factor multiplies a term of an exact coefficient.  Its Wirtinger
derivative only needs ``d/dr``:  d/dz_k phi(r) = phi'(r) * conj(z_k).
Radial objects are hashable so that like terms can be merged.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
import sympy as sp

__all__ = ["R", "Radial", "SymRadial", "SplineRadial", "ProductRadial", "multiply"]

R = sp.Symbol("r", positive=True)


class Radial:
    key: tuple

    def __call__(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self) -> list["Radial"]:
        """d/dr as a list of radial summands."""
        raise NotImplementedError

    def conj(self) -> "Radial":
        raise NotImplementedError

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Radial) and self.key == other.key

    def __mul__(self, other: "Radial") -> "Radial":
        return multiply(self, other)


class SymRadial(Radial):
    """Radial factor given by a sympy expression in ``R``."""

    _derivatives: dict = {}

    def __init__(self, expr):
        self.expr = sp.sympify(expr)
        if self.expr.free_symbols - {R}:
            raise ValueError(f"radial expression may only depend on r: {self.expr}")
        self.key = ("sym", self.expr)

    @cached_property
    def _fn(self):
        return sp.lambdify(R, self.expr, modules="numpy")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            out = self._fn(r)
        return np.broadcast_to(np.asarray(out, dtype=complex), r.shape)

    def derivative(self):
        d = SymRadial._derivatives.get(self.expr)
        if d is None:
            d = SymRadial(sp.diff(self.expr, R))
            SymRadial._derivatives[self.expr] = d
        return [d] if d.expr != 0 else []

    def conj(self):
        return SymRadial(sp.conjugate(self.expr))

    def __repr__(self):
        return f"SymRadial({self.expr})"


class SplineRadial(Radial):
    """Wraps a scipy piecewise polynomial (anything with ``derivative()``).

    Outside ``[lo, hi]`` the function is continued by its end values; the
    derivative there is zero.
    """

    def __init__(self, poly, lo: float, hi: float, _tag=None):
        self.poly = poly
        self.lo, self.hi = float(lo), float(hi)
        self.key = ("spline", id(poly) if _tag is None else _tag)
        self._deriv = None
        self._order = 0 if _tag is None else _tag[1]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        rc = np.clip(r, self.lo, self.hi)
        out = np.asarray(self.poly(rc), dtype=complex)
        if self._order > 0:
            out = np.where((r < self.lo) | (r > self.hi), 0.0, out)
        return out

    def derivative(self):
        if self._deriv is None:
            base = self.key[1] if self._order == 0 else self.key[1][0]
            tag = (base, self._order + 1)
            self._deriv = SplineRadial(self.poly.derivative(), self.lo, self.hi, _tag=tag)
            self._deriv._order = self._order + 1
        return [self._deriv]

    def conj(self):
        return self


class ProductRadial(Radial):
    def __init__(self, factors):
        flat = []
        sym = sp.Integer(1)
        for f in factors:
            if isinstance(f, ProductRadial):
                for g in f.factors:
                    if isinstance(g, SymRadial):
                        sym = sym * g.expr
                    else:
                        flat.append(g)
            elif isinstance(f, SymRadial):
                sym = sym * f.expr
            else:
                flat.append(f)
        flat.sort(key=lambda f: repr(f.key))
        if sym != 1:
            flat.insert(0, SymRadial(sym))
        self.factors = tuple(flat)
        self.key = ("prod",) + tuple(f.key for f in self.factors)

    def __call__(self, r):
        out = None
        for f in self.factors:
            v = f(r)
            out = v if out is None else out * v
        return out

    def derivative(self):
        out = []
        for i, f in enumerate(self.factors):
            for df in f.derivative():
                rest = list(self.factors[:i]) + [df] + list(self.factors[i + 1:])
                out.append(_collapse(rest))
        return out

    def conj(self):
        return _collapse([f.conj() for f in self.factors])


def _collapse(factors) -> Radial:
    p = ProductRadial(factors)
    return p.factors[0] if len(p.factors) == 1 else p


def multiply(a: Radial | None, b: Radial | None) -> Radial | None:
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, SymRadial) and isinstance(b, SymRadial):
        return SymRadial(a.expr * b.expr)
    return _collapse([a, b])
