import numpy as np
import pytest
from hypothesis import given

from ymforms.algebra import (
    TraceKind, adjoint, as_cmatrix, commutator, inner, is_normal, matrix_from_json, matrix_to_json, trace,
)

from strategies import cmatrices


@given(cmatrices(), cmatrices())
def test_trace_is_cyclic(a, b):
    assert trace(a @ b) == pytest.approx(trace(b @ a), abs=1e-12)


@given(cmatrices(), cmatrices())
def test_adjoint_reverses_products(a, b):
    np.testing.assert_allclose(adjoint(a @ b), adjoint(b) @ adjoint(a), atol=1e-12)


@given(cmatrices(), cmatrices(), cmatrices())
def test_commutator_jacobi(a, b, c):
    s = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    np.testing.assert_allclose(s, 0, atol=1e-10)


@given(cmatrices(3))
def test_inner_is_positive(a):
    assert inner(a, a).real >= -1e-12
    assert abs(inner(a, a).imag) < 1e-12
    assert inner(a, a) == pytest.approx(np.sum(np.abs(a) ** 2))


def test_state_trace_is_normalized():
    assert trace(np.eye(3), TraceKind.STATE) == pytest.approx(1.0)
    assert trace(np.eye(3), "matrix") == pytest.approx(3.0)
    with pytest.raises(ValueError):
        TraceKind.parse("weird")


def test_normality():
    assert is_normal(np.diag([1, 2j]))
    assert is_normal(np.array([[0, 1], [-1, 0]]))
    assert not is_normal(np.array([[0, 1], [0, 0]]))


def test_batched_adjoint():
    a = np.arange(8).reshape(2, 2, 2) * (1 + 1j)
    np.testing.assert_array_equal(adjoint(a)[1], a[1].conj().T)


@given(cmatrices(3))
def test_json_roundtrip(a):
    np.testing.assert_array_equal(matrix_from_json(matrix_to_json(a), 3), a)


def test_json_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        matrix_from_json(matrix_to_json(np.eye(2)), 3)
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros((2, 3)))
