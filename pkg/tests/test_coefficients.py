import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from ymforms.coefficients import (
    ExactCoefficient, FunctionCoefficient, SingularValueError, constant, exp_term, expm, fd_wirtinger, inverse,
    monomial, poly, poly_from_json, poly_to_json, radial_term, variable, zero,
)
from ymforms.radial import R, SymRadial

from strategies import cmatrices, polynomials

Z = sp.symbols("z1 z2 w1 w2")  # w_k stands for conj(z_k)


def sympy_entries(terms):
    """Entrywise sympy expression of sum M * z^powers, treating conjugates as independent."""
    n = np.asarray(terms[0][1]).shape[0]
    out = sp.zeros(n, n)
    for pw, m in terms:
        mono = sp.Mul(*(Z[i] ** pw[i] for i in range(4)))
        out += sp.Matrix(np.asarray(m).tolist()) * mono
    return out


def sympy_eval(expr, z1, z2):
    f = sp.lambdify(Z, expr, "numpy")
    vals = [f(a, b, np.conj(a), np.conj(b)) for a, b in zip(z1, z2)]
    return np.array(vals, dtype=complex)


@given(st.lists(st.tuples(st.tuples(*(st.integers(0, 3) for _ in range(4))), cmatrices()), min_size=1, max_size=3),
       st.integers(0, 3))
def test_wirtinger_matches_symbolic(terms, k):
    c = poly(terms, 2)
    z1 = np.array([0.3 + 0.7j, -1.1 + 0.2j])
    z2 = np.array([0.5 - 0.4j, 0.9 + 1.3j])
    want = sympy_eval(sympy_entries(terms).diff(Z[k]), z1, z2)
    np.testing.assert_allclose(c.wirtinger(k)(z1, z2), want, atol=1e-10)


def test_wirtinger_matches_finite_differences(points):
    z1, z2 = points
    c = exp_term((0.3j, 0, -0.2, 0), [[1, 2j], [0, -1]], powers=(2, 1, 0, 1))
    for k in range(4):
        fd = fd_wirtinger(c, z1, z2, k, richardson=True)
        np.testing.assert_allclose(c.wirtinger(k)(z1, z2), fd, atol=1e-7)


def test_radial_derivative(points):
    z1, z2 = points
    c = radial_term(SymRadial(R / (R + 1)), np.eye(2))
    for k in range(4):
        fd = fd_wirtinger(c, z1, z2, k, richardson=True)
        np.testing.assert_allclose(c.wirtinger(k)(z1, z2), fd, atol=1e-8)


@given(polynomials(), polynomials())
def test_product_rule(a, b):
    z1, z2 = np.array([0.4 + 0.1j]), np.array([-0.3 + 0.8j])
    for k in range(4):
        lhs = (a @ b).wirtinger(k)(z1, z2)
        rhs = (a.wirtinger(k) @ b + a @ b.wirtinger(k))(z1, z2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@given(polynomials())
def test_adjoint_is_pointwise_conjugate_transpose(a):
    z1, z2 = np.array([0.4 + 0.1j, 1j]), np.array([-0.3 + 0.8j, 2.0])
    np.testing.assert_allclose(a.adjoint()(z1, z2), np.conj(np.swapaxes(a(z1, z2), -1, -2)), atol=1e-12)


@given(polynomials())
def test_adjoint_swaps_derivatives(a):
    # d/dz_k (a^*) = (d/dzb_k a)^*
    z1, z2 = np.array([0.4 + 0.1j]), np.array([-0.3 + 0.8j])
    for k, kb in ((0, 2), (1, 3), (2, 0), (3, 1)):
        np.testing.assert_allclose(a.adjoint().wirtinger(k)(z1, z2), a.wirtinger(kb).adjoint()(z1, z2), atol=1e-10)


@given(polynomials())
def test_poly_json_roundtrip(a):
    b = poly_from_json(poly_to_json(a), 2)
    z1, z2 = np.array([0.4 + 0.1j]), np.array([-0.3 + 0.8j])
    np.testing.assert_allclose(a(z1, z2), b(z1, z2))


def test_poly_json_errors():
    with pytest.raises(ValueError):
        poly_from_json([{"powers": [1, 0, 0], "matrix": [[[1, 0]]]}])
    with pytest.raises(ValueError):
        poly_from_json([{"powers": [1, 0, 0, -1], "matrix": [[[1, 0]]]}])
    with pytest.raises(ValueError):
        poly_from_json([{"powers": [0, 0, 0, 0], "matrix": [[[1, 0]]]}], dim=2)


def test_holomorphic_flags():
    assert variable(0).is_holomorphic()
    assert not variable(2).is_holomorphic()
    assert (variable(0) * 3).is_polynomial()
    assert not exp_term((1, 0, 0, 0), [[1]]).is_polynomial()
    assert zero(2).is_zero()


def test_antiderivative_and_substitute():
    z = np.array([0.3 + 0.2j, -1 + 1j])
    h = monomial((2, 1, 0, 0), [[1]]) + exp_term((0, 2j, 0, 0), [[1]])
    H = h.antiderivative(1)
    np.testing.assert_allclose(H.wirtinger(1)(z, z), h(z, z), atol=1e-12)
    np.testing.assert_allclose(H(z, 0 * z), 0, atol=1e-12)
    s = h.substitute(0, 2.0)
    np.testing.assert_allclose(s(z, z), h(0 * z + 2.0, z))
    with pytest.raises(ValueError):
        variable(3).antiderivative(1)


def test_times_matrix_requires_scalar():
    with pytest.raises(ValueError):
        constant(np.eye(2)).times_matrix(np.eye(2))


def test_expm_against_series():
    X = np.array([[0.1, 0.5j], [-0.2, 0.3]])
    series = sum(np.linalg.matrix_power(X, k) / math.factorial(k) for k in range(25))
    M = constant(X)
    np.testing.assert_allclose(np.squeeze(expm(M)(0.0, 0.0)), series, atol=1e-14)


def test_commuting_expm_derivative(points):
    z1, z2 = points
    E = expm(variable(0).times_matrix(np.diag([1.0, -0.5j])), commuting=True)
    for k in range(4):
        np.testing.assert_allclose(E.wirtinger(k)(z1, z2), fd_wirtinger(E, z1, z2, k, richardson=True), atol=1e-6)


def test_inverse_and_singularity():
    g = constant(np.eye(2)) + variable(0).times_matrix(np.array([[0, 1], [0, 0]]))
    gi = inverse(g)
    z = np.array([0.5 + 1j])
    np.testing.assert_allclose(np.squeeze(gi(z, z) @ g(z, z)), np.eye(2), atol=1e-12)
    sing = inverse(variable(0).times_matrix(np.eye(2)))
    with pytest.raises(SingularValueError):
        sing(np.array([0j]), np.array([0j]))


def test_function_coefficient_derivative(points):
    z1, z2 = points
    f = FunctionCoefficient(lambda a, b: (a * np.conj(b))[..., None, None] * np.eye(2), 2, richardson=True)
    exact = monomial((1, 0, 0, 1), np.eye(2))
    for k in range(4):
        np.testing.assert_allclose(f.wirtinger(k)(z1, z2), exact.wirtinger(k)(z1, z2), atol=1e-7)


def test_exact_coefficient_shape():
    c = constant(np.eye(3))
    assert isinstance(c, ExactCoefficient)
    assert c(np.zeros((2, 5)), np.zeros((2, 5))).shape == (2, 5, 3, 3)
