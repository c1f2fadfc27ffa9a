"""Matrix C*-algebra core.

Elements of M_n(C) are plain ``numpy`` complex arrays.  Every function here
also accepts stacks of matrices (shape ``(..., n, n)``) so that pointwise
evaluations over a batch of points can be fed straight through.
"""
from __future__ import annotations

import enum

import numpy as np

__all__ = [
    "TraceKind",
    "as_cmatrix",
    "adjoint",
    "commutator",
    "trace",
    "inner",
    "is_normal",
    "frobenius",
    "PAULI",
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "matrix_to_json",
    "matrix_from_json",
]


class TraceKind(enum.Enum):
    """Which trace functional to use: unnormalised, or the tracial state Tr(I) = 1."""

    MATRIX = "matrix"
    STATE = "state"

    @classmethod
    def parse(cls, value: "TraceKind | str | None") -> "TraceKind":
        if value is None:
            return cls.MATRIX
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def as_cmatrix(a, dim: int | None = None) -> np.ndarray:
    """Coerce to a complex square matrix (or stack of them)."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[-1] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[-1]}")
    return arr


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def adjoint(a) -> np.ndarray:
    a = as_cmatrix(a)
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a, b) -> np.ndarray:
    """``ab - ba``."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    _same_dim(a, b)
    return a @ b - b @ a


def trace(a, kind: TraceKind | str = TraceKind.MATRIX):
    a = as_cmatrix(a)
    t = np.trace(a, axis1=-2, axis2=-1)
    if TraceKind.parse(kind) is TraceKind.STATE:
        t = t / a.shape[-1]
    return t


def inner(a, b, kind: TraceKind | str = TraceKind.MATRIX):
    """``<a, b> = Tr(a b*)``; linear in ``a``, conjugate-linear in ``b``."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    _same_dim(a, b)
    # Tr(a b*) = sum_ij a_ij conj(b_ij)
    t = np.sum(a * np.conj(b), axis=(-2, -1))
    if TraceKind.parse(kind) is TraceKind.STATE:
        t = t / a.shape[-1]
    return t


def frobenius(a) -> np.ndarray:
    return np.linalg.norm(np.asarray(a), axis=(-2, -1))


def is_normal(a, tol: float = 1e-10) -> bool:
    """True iff ``||aa* - a*a||_F <= tol * max(1, ||a||_F^2)``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a = as_cmatrix(a)
    ah = adjoint(a)
    gap = frobenius(a @ ah - ah @ a)
    bound = tol * np.maximum(1.0, frobenius(a) ** 2)
    return bool(np.all(gap <= bound))


SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA1, SIGMA2, SIGMA3)
for _s in PAULI:
    _s.setflags(write=False)


def matrix_to_json(a) -> list:
    """Nested ``[re, im]`` pairs, the scenario-file encoding."""
    a = as_cmatrix(a)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_json(data, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrix must be a nested list of [re, im] pairs")
    return as_cmatrix(arr[..., 0] + 1j * arr[..., 1], dim)
